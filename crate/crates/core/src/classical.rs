//! Classical decision procedures: satisfiability, entailment, valuation
//! enumeration, prime implicates and new consequences.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use thiserror::Error;

use crate::syntax::{reduce_subsumed, Atom, Clause, ClauseSet, Formula, Literal};

pub const DEFAULT_MAX_ATOMS: usize = 24;
/// Bitmask valuations cap out here no matter what the environment says.
pub const HARD_MAX_ATOMS: usize = 40;

/// Size guard for enumeration, `ATMOD_MAX_ATOMS` or 24.
pub fn max_atoms() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("ATMOD_MAX_ATOMS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(DEFAULT_MAX_ATOMS)
            .min(HARD_MAX_ATOMS)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("universe of {count} atoms exceeds the limit of {limit} (set ATMOD_MAX_ATOMS to raise it)")]
    TooManyAtoms { count: usize, limit: usize },
    #[error("atom `{0}` is not in the universe")]
    UnknownAtom(String),
}

/// A total assignment over a universe, bit `i` for the `i`-th atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(pub u64);

impl Valuation {
    pub fn get(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize, value: bool) -> Valuation {
        if value {
            Valuation(self.0 | 1 << i)
        } else {
            Valuation(self.0 & !(1 << i))
        }
    }
}

/// An ordered, duplicate-free atom list fixing the bitmask layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl Universe {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Result<Universe, EngineError> {
        let mut u = Universe { atoms: Vec::new(), index: HashMap::new() };
        for a in atoms {
            if !u.index.contains_key(&a) {
                u.index.insert(a.clone(), u.atoms.len());
                u.atoms.push(a);
            }
        }
        let limit = max_atoms();
        if u.atoms.len() > limit {
            return Err(EngineError::TooManyAtoms { count: u.atoms.len(), limit });
        }
        Ok(u)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, a: &Atom) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// Number of valuations, `2^n`.
    pub fn size(&self) -> u64 {
        1u64 << self.atoms.len()
    }

    pub fn valuations(&self) -> impl Iterator<Item = Valuation> {
        (0..self.size()).map(Valuation)
    }

    pub fn compile(&self, f: &Formula) -> Result<Compiled, EngineError> {
        Ok(Compiled(compile(f, self)?))
    }

    pub fn literal_holds(&self, v: Valuation, l: &Literal) -> bool {
        match self.index_of(&l.atom) {
            Some(i) => v.get(i) != l.negated,
            None => false,
        }
    }

    /// The conjunction of literals describing `v` exactly.
    pub fn term(&self, v: Valuation) -> Formula {
        Formula::conjunction(self.atoms.iter().enumerate().map(|(i, a)| {
            let l = if v.get(i) { Literal::pos(a.clone()) } else { Literal::neg(a.clone()) };
            l.to_formula()
        }))
    }

    pub fn describe(&self, v: Valuation) -> String {
        let parts: Vec<String> = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| if v.get(i) { a.to_string() } else { format!("~{a}") })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug)]
enum Node {
    Const(bool),
    Var(usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
}

fn compile(f: &Formula, u: &Universe) -> Result<Node, EngineError> {
    let bin = |a: &Formula, b: &Formula| -> Result<(Box<Node>, Box<Node>), EngineError> {
        Ok((Box::new(compile(a, u)?), Box::new(compile(b, u)?)))
    };
    Ok(match f {
        Formula::True => Node::Const(true),
        Formula::False => Node::Const(false),
        Formula::Atom(a) => Node::Var(u.index_of(a).ok_or_else(|| EngineError::UnknownAtom(a.to_string()))?),
        Formula::Not(x) => Node::Not(Box::new(compile(x, u)?)),
        Formula::And(a, b) => {
            let (x, y) = bin(a, b)?;
            Node::And(x, y)
        }
        Formula::Or(a, b) => {
            let (x, y) = bin(a, b)?;
            Node::Or(x, y)
        }
        Formula::Implies(a, b) => {
            let (x, y) = bin(a, b)?;
            Node::Implies(x, y)
        }
        Formula::Iff(a, b) => {
            let (x, y) = bin(a, b)?;
            Node::Iff(x, y)
        }
    })
}

/// A formula with atoms resolved to bit positions.
#[derive(Clone, Debug)]
pub struct Compiled(Node);

impl Compiled {
    pub fn eval(&self, v: Valuation) -> bool {
        eval_node(&self.0, v)
    }
}

fn eval_node(n: &Node, v: Valuation) -> bool {
    match n {
        Node::Const(b) => *b,
        Node::Var(i) => v.get(*i),
        Node::Not(x) => !eval_node(x, v),
        Node::And(a, b) => eval_node(a, v) && eval_node(b, v),
        Node::Or(a, b) => eval_node(a, v) || eval_node(b, v),
        Node::Implies(a, b) => !eval_node(a, v) || eval_node(b, v),
        Node::Iff(a, b) => eval_node(a, v) == eval_node(b, v),
    }
}

fn all_atoms<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    for f in fs {
        f.collect_atoms(&mut out);
    }
    out
}

// DPLL over integer literals: atom i is +(i+1) / -(i+1).

fn dpll(clauses: &[Vec<i32>], assign: &mut Vec<i8>) -> bool {
    // unit propagation to fixpoint
    let mut trail: Vec<usize> = Vec::new();
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut n_unassigned = 0;
            let mut satisfied = false;
            for &l in c {
                let var = (l.unsigned_abs() - 1) as usize;
                match assign[var] {
                    0 => {
                        n_unassigned += 1;
                        unassigned = Some(l);
                    }
                    s if (s > 0) == (l > 0) => {
                        satisfied = true;
                        break;
                    }
                    _ => {}
                }
            }
            if satisfied {
                continue;
            }
            match n_unassigned {
                0 => {
                    for v in trail {
                        assign[v] = 0;
                    }
                    return false;
                }
                1 => {
                    let l = unassigned.unwrap();
                    let var = (l.unsigned_abs() - 1) as usize;
                    assign[var] = if l > 0 { 1 } else { -1 };
                    trail.push(var);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    // branch on the first unassigned variable of an open clause
    let mut pick = None;
    'outer: for c in clauses {
        if c.iter().any(|&l| {
            let s = assign[(l.unsigned_abs() - 1) as usize];
            s != 0 && (s > 0) == (l > 0)
        }) {
            continue;
        }
        for &l in c {
            if assign[(l.unsigned_abs() - 1) as usize] == 0 {
                pick = Some(l);
                break 'outer;
            }
        }
    }
    let Some(l) = pick else { return true };
    let var = (l.unsigned_abs() - 1) as usize;
    for value in [if l > 0 { 1 } else { -1 }, if l > 0 { -1 } else { 1 }] {
        assign[var] = value;
        if dpll(clauses, assign) {
            return true;
        }
    }
    assign[var] = 0;
    for v in trail {
        assign[v] = 0;
    }
    false
}

fn solve(cs: &ClauseSet, universe: &[Atom]) -> Option<Vec<bool>> {
    let index: HashMap<&Atom, usize> = universe.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut clauses = Vec::with_capacity(cs.len());
    for c in cs {
        if c.is_empty() {
            return None;
        }
        clauses.push(
            c.literals()
                .map(|l| {
                    let v = index[&l.atom] as i32 + 1;
                    if l.negated {
                        -v
                    } else {
                        v
                    }
                })
                .collect::<Vec<i32>>(),
        );
    }
    let mut assign = vec![0i8; universe.len()];
    if dpll(&clauses, &mut assign) {
        Some(assign.iter().map(|&s| s > 0).collect())
    } else {
        None
    }
}

pub(crate) fn clauses_satisfiable(cs: &ClauseSet) -> bool {
    let atoms: Vec<Atom> = cs.iter().flat_map(|c| c.atoms()).collect::<BTreeSet<_>>().into_iter().collect();
    solve(cs, &atoms).is_some()
}

fn clauses_of<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> ClauseSet {
    let mut cs = ClauseSet::new();
    for f in fs {
        cs.extend(f.clauses());
    }
    cs
}

/// A satisfying assignment over the formulas' own atoms, checked against
/// every input before it is returned.
pub fn find_model(fs: &[Formula]) -> Option<Vec<(Atom, bool)>> {
    let atoms: Vec<Atom> = all_atoms(fs).into_iter().collect();
    let model = solve(&clauses_of(fs), &atoms)?;
    let lookup: HashMap<&Atom, bool> = atoms.iter().zip(model.iter().copied()).collect();
    let truth = |a: &Atom| lookup.get(a).copied().unwrap_or(false);
    assert!(fs.iter().all(|f| f.eval(&truth)), "solver returned a non-model");
    Some(atoms.iter().cloned().zip(model).collect())
}

pub fn satisfiable(fs: &[Formula]) -> bool {
    find_model(fs).is_some()
}

pub fn entails(fs: &[Formula], phi: &Formula) -> bool {
    let mut all = fs.to_vec();
    all.push(Formula::not(phi.clone()));
    !satisfiable(&all)
}

pub fn equivalent(a: &Formula, b: &Formula) -> bool {
    !satisfiable(&[Formula::not(Formula::iff(a.clone(), b.clone()))])
}

/// Every valuation over `universe` satisfying all of `fs`, in bitmask order.
pub fn valuations_of(fs: &[Formula], universe: &[Atom]) -> Result<Vec<Valuation>, EngineError> {
    let u = Universe::new(universe.iter().cloned())?;
    let compiled = fs.iter().map(|f| u.compile(f)).collect::<Result<Vec<_>, _>>()?;
    Ok(u.valuations().filter(|&v| compiled.iter().all(|c| c.eval(v))).collect())
}

/// Prime implicates by resolution saturation with subsumption deletion.
pub fn prime_implicates(fs: &[Formula]) -> ClauseSet {
    prime_implicates_of_clauses(clauses_of(fs))
}

pub fn prime_implicates_of_clauses(input: ClauseSet) -> ClauseSet {
    let input: ClauseSet = input.into_iter().filter(|c| !c.is_tautology()).collect();
    let mut agenda: Vec<Clause> = reduce_subsumed(input).into_iter().rev().collect();
    let mut kept: Vec<Clause> = Vec::new();
    while let Some(c) = agenda.pop() {
        if kept.iter().any(|k| k.subsumes(&c)) {
            continue;
        }
        if c.is_empty() {
            return BTreeSet::from([Clause::empty()]);
        }
        kept.retain(|k| !c.subsumes(k));
        for k in &kept {
            for l in c.literals() {
                if let Some(r) = c.resolve(k, l) {
                    if !r.is_tautology() {
                        agenda.push(r);
                    }
                }
            }
        }
        kept.push(c);
    }
    kept.into_iter().collect()
}

/// `PI(A ∧ ψ) \ PI(A)`.
pub fn new_cons(fs: &[Formula], psi: &Formula) -> ClauseSet {
    let base = prime_implicates(fs);
    let mut with = fs.to_vec();
    with.push(psi.clone());
    prime_implicates(&with).into_iter().filter(|c| !base.contains(c)).collect()
}
