//! Generators shared by the property suites.
#![allow(dead_code)]

pub mod checks;

use atmod::syntax::Literal;
use atmod::theory::{DependenceRelation, EffectLaw, Precondition, StaticLaw};
use atmod::{parse_theory, satisfiable, validate, ActionTheory, Formula, Query};
use proptest::prelude::*;

pub const FLUENTS: [&str; 5] = ["p", "q", "r", "s", "u"];
pub const ACTIONS: [&str; 2] = ["a", "b"];

pub fn fixture(name: &str) -> ActionTheory {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_theory(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub const FIXTURES: [&str; 9] = [
    "yale.at",
    "yale_noexec.at",
    "never_armed.at",
    "intline.at",
    "blocked_inexec.at",
    "coffee.at",
    "gun_precondition.at",
    "shooting.at",
    "empty.at",
];

/// Formulas over the first `n` fluents, up to `depth` connectives deep.
pub fn formula(n: usize, depth: u32) -> BoxedStrategy<Formula> {
    let names: Vec<&'static str> = FLUENTS[..n].to_vec();
    let leaf = prop_oneof![
        6 => proptest::sample::select(names).prop_map(Formula::atom),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            2 => inner.clone().prop_map(Formula::not),
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            1 => (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
    .boxed()
}

/// A conjunction of literals over distinct fluents among the first `n`.
pub fn term(n: usize) -> BoxedStrategy<Formula> {
    proptest::collection::vec(0u8..3, n)
        .prop_map(|pick| {
            Formula::conjunction(pick.iter().enumerate().filter_map(|(i, &c)| match c {
                0 => None,
                1 => Some(Formula::atom(FLUENTS[i])),
                _ => Some(Formula::not(Formula::atom(FLUENTS[i]))),
            }))
        })
        .boxed()
}

fn consistent(f: &Formula) -> bool {
    satisfiable(std::slice::from_ref(f))
}

#[derive(Clone, Debug)]
struct RawAction {
    effects: Vec<(Formula, Formula)>,
    execs: Vec<Formula>,
    inexecs: Vec<Formula>,
    dep: u16,
}

fn raw_action(n: usize) -> impl Strategy<Value = RawAction> {
    let f = || formula(n, 2);
    (
        proptest::collection::vec((f(), f()), 0..=2),
        proptest::collection::vec(f(), 0..=2),
        proptest::collection::vec(f(), 0..=2),
        any::<u16>(),
    )
        .prop_map(|(effects, execs, inexecs, dep)| RawAction { effects, execs, inexecs, dep })
}

/// Well-formed theories with 1..=max_fluents fluents, 1..=2 actions, at most 2 laws per kind.
/// Laws with inconsistent parts are dropped, effects with inconsistent consequents become inexecutabilities.
pub fn theory(max_fluents: usize) -> BoxedStrategy<ActionTheory> {
    (1..=max_fluents, 1..=2usize)
        .prop_flat_map(|(n, m)| {
            (Just(n), proptest::collection::vec(formula(n, 2), 0..=2), proptest::collection::vec(raw_action(n), m))
        })
        .prop_map(|(n, statics, raw)| {
            let actions: Vec<&str> = ACTIONS[..raw.len()].to_vec();
            let mut t = ActionTheory::empty("random", &actions, &FLUENTS[..n]);
            t.statics = statics.into_iter().filter(consistent).map(StaticLaw::new).collect();
            let mut dep = DependenceRelation::new();
            for (ai, r) in raw.iter().enumerate() {
                let laws = &mut t.actions[ai];
                for (phi, psi) in &r.effects {
                    if !consistent(phi) {
                        continue;
                    }
                    if consistent(psi) {
                        laws.effects.push(EffectLaw::new(phi.clone(), psi.clone()));
                    } else {
                        laws.inexecutabilities.push(Precondition::new(phi.clone()));
                    }
                }
                laws.executabilities =
                    r.execs.iter().filter(|f| consistent(f)).cloned().map(Precondition::new).collect();
                laws.inexecutabilities
                    .extend(r.inexecs.iter().filter(|f| consistent(f)).cloned().map(Precondition::new));
                laws.inexecutabilities.truncate(2);
                for (i, p) in FLUENTS[..n].iter().enumerate() {
                    if r.dep >> (2 * i) & 1 == 1 {
                        dep.insert(actions[ai], Literal::pos(*p));
                    }
                    if r.dep >> (2 * i + 1) & 1 == 1 {
                        dep.insert(actions[ai], Literal::neg(*p));
                    }
                }
            }
            t.dependence = dep;
            assert!(validate(&t).is_empty());
            t
        })
        .boxed()
}

/// A depth-1 query over the theory's vocabulary; antecedents are terms or small formulas.
pub fn query(n: usize, m: usize) -> BoxedStrategy<Query> {
    let ante = prop_oneof![term(n), formula(n, 2)];
    let action = proptest::sample::select(ACTIONS[..m].to_vec());
    let consequent = prop_oneof![3 => formula(n, 2), 1 => Just(Formula::False)];
    prop_oneof![
        1 => formula(n, 2).prop_map(Query::Classical),
        3 => (action.clone(), ante.clone(), consequent)
            .prop_map(|(a, antecedent, consequent)| Query::Box { action: a.to_string(), antecedent, consequent }),
        2 => (action, ante).prop_map(|(a, antecedent)| Query::Diamond { action: a.to_string(), antecedent }),
    ]
    .boxed()
}

/// A theory together with `k` queries over its vocabulary.
pub fn theory_with_queries(max_fluents: usize, k: usize) -> BoxedStrategy<(ActionTheory, Vec<Query>)> {
    theory(max_fluents)
        .prop_flat_map(move |t| {
            let n = t.domain.fluents.len();
            let m = t.domain.actions.len();
            (Just(t), proptest::collection::vec(query(n, m), k))
        })
        .boxed()
}
