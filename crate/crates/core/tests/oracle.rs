mod common;

use common::checks::oracle_agrees;
use common::{fixture, theory_with_queries};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};

use atmod::analysis::{implicit_static_laws, NewConsBase, Options};
use atmod::kripke::{entails_dep, enumerate_countermodel, holds_at, is_dep_model, ENUM_DEFAULT_WORLDS};
use atmod::{entails, parse_query, ActionTheory, Formula, Query};

#[test]
fn frame_agrees_with_countermodel_search() {
    let mut runner = TestRunner::new(Config::default());
    let strategy = theory_with_queries(3, 20);
    for _ in 0..120 {
        let (t, qs) = strategy.new_tree(&mut runner).unwrap().current();
        oracle_agrees(&t, &qs, ENUM_DEFAULT_WORLDS).unwrap();
    }
}

#[test]
fn countermodels_refute_and_satisfy() {
    let t = fixture("yale.at");
    let q = parse_query("walking => [shoot] walking").unwrap();
    let m = enumerate_countermodel(&t, &q, 2).unwrap().expect("shoot may stop the walk");
    assert!(is_dep_model(&m, &t).unwrap());
    assert!((0..m.worlds.len()).any(|w| !holds_at(&m, w, &q).unwrap()));
}

#[test]
fn spec_vectors() {
    let empty = ActionTheory::empty("e", &["a"], &["p"]);
    let m = enumerate_countermodel(&empty, &parse_query("p => <a> true").unwrap(), 1).unwrap().unwrap();
    assert_eq!(m.worlds.len(), 1);
    assert!(m.rel["a"].is_empty());
    let t1 = fixture("yale.at");
    assert!(enumerate_countermodel(&t1, &parse_query("alive").unwrap(), 2).unwrap().is_none());
    let t2 = fixture("yale_noexec.at");
    assert!(enumerate_countermodel(&t2, &parse_query("~alive => [tease] false").unwrap(), 2).unwrap().is_none());
    assert!(entails_dep(&t2, &parse_query("~alive => [tease] false").unwrap()).unwrap());
}

const LATE_ROUND: &str = "theory late {
  fluents p q r;
  actions b;
  action b {
    causes p, ~p, q, r, ~r;
    effect (r <-> q) & ~p => (false <-> r) | r & p;
    effect ~(false | p) => true | p;
    executable (r <-> p) | (false | r);
    executable r & true -> q & q;
    inexecutable (r -> p) | ~q;
  }
}";

fn captures(t: &ActionTheory, base: NewConsBase, f: &Formula) -> bool {
    let opts = Options { newcons_base: base, subset_cap: 16 };
    let mut laws = t.static_formulas();
    laws.extend(implicit_static_laws(t, "b", &opts).unwrap().into_iter().map(|x| x.raw));
    entails(&laws, f)
}

/// Later rounds need the laws found so far in the base of the new-consequence step.
#[test]
fn literal_base_can_stop_short() {
    let t = atmod::parse_theory(LATE_ROUND).unwrap();
    let f = atmod::parse_formula("~(~p & q & r)").unwrap();
    assert!(entails_dep(&t, &Query::Classical(f.clone())).unwrap());
    assert!(!captures(&t, NewConsBase::Literal, &f));
    assert!(captures(&t, NewConsBase::Grow, &f));
}
