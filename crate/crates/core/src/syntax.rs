//! Propositional formulas, literals and clauses.
//!
//! Everything here is immutable once built. Clauses are kept canonical
//! (sorted, duplicate free) so clause sets compare syntactically.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A propositional constant (fluent name).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Atom {
        Atom(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Atom {
        Atom::new(s)
    }
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: impl Into<Atom>) -> Literal {
        Literal { atom: atom.into(), negated: false }
    }

    pub fn neg(atom: impl Into<Atom>) -> Literal {
        Literal { atom: atom.into(), negated: true }
    }

    pub fn negate(&self) -> Literal {
        Literal { atom: self.atom.clone(), negated: !self.negated }
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::Atom(self.atom.clone());
        if self.negated {
            Formula::not(a)
        } else {
            a
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~{}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

/// A disjunction of literals. The empty clause is falsum.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause(BTreeSet<Literal>);

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Clause {
        Clause(lits.into_iter().collect())
    }

    pub fn empty() -> Clause {
        Clause(BTreeSet::new())
    }

    pub fn unit(l: Literal) -> Clause {
        Clause::new([l])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.0.iter()
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.0.contains(l)
    }

    pub fn is_tautology(&self) -> bool {
        self.0.iter().any(|l| !l.negated && self.0.contains(&l.negate()))
    }

    /// `self ⊆ other`, i.e. self entails other.
    pub fn subsumes(&self, other: &Clause) -> bool {
        self.0.len() <= other.0.len() && self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &Clause) -> Clause {
        Clause(self.0.union(&other.0).cloned().collect())
    }

    /// Resolvent on `l ∈ self`, `¬l ∈ other`.
    pub fn resolve(&self, other: &Clause, l: &Literal) -> Option<Clause> {
        let nl = l.negate();
        if !self.0.contains(l) || !other.0.contains(&nl) {
            return None;
        }
        let mut out: BTreeSet<Literal> = self.0.iter().filter(|x| *x != l).cloned().collect();
        out.extend(other.0.iter().filter(|x| **x != nl).cloned());
        Some(Clause(out))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.0.iter().map(|l| l.atom.clone()).collect()
    }

    pub fn to_formula(&self) -> Formula {
        Formula::disjunction(self.0.iter().map(Literal::to_formula))
    }

    /// The conjunction of the complementary literals, i.e. `¬χ` in term form.
    pub fn negation_term(&self) -> Formula {
        Formula::conjunction(self.0.iter().map(|l| l.negate().to_formula()))
    }
}

impl Ord for Clause {
    fn cmp(&self, other: &Clause) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Clause) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("false");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Clause {
        Clause::new(iter)
    }
}

pub type ClauseSet = BTreeSet<Clause>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; the empty conjunction is `True`.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; the empty disjunction is `False`.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(x) => x.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn eval(&self, truth: &dyn Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => truth(a),
            Formula::Not(x) => !x.eval(truth),
            Formula::And(a, b) => a.eval(truth) && b.eval(truth),
            Formula::Or(a, b) => a.eval(truth) || b.eval(truth),
            Formula::Implies(a, b) => !a.eval(truth) || b.eval(truth),
            Formula::Iff(a, b) => a.eval(truth) == b.eval(truth),
        }
    }

    /// The literal this formula denotes, if it is one.
    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Atom(a) => Some(Literal::pos(a.clone())),
            Formula::Not(x) => match &**x {
                Formula::Atom(a) => Some(Literal::neg(a.clone())),
                _ => None,
            },
            _ => None,
        }
    }

    /// Constant elimination, double negation, and removal of repeated
    /// members in conjunction/disjunction chains.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(x) => match x.simplify() {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                Formula::Not(y) => *y,
                y => Formula::not(y),
            },
            Formula::And(..) => {
                let mut parts = Vec::new();
                self.flatten_and(&mut parts);
                let mut kept: Vec<Formula> = Vec::new();
                for p in parts {
                    match p.simplify() {
                        Formula::True => {}
                        Formula::False => return Formula::False,
                        q => {
                            if !kept.contains(&q) {
                                kept.push(q);
                            }
                        }
                    }
                }
                rebuild_flat(kept, Formula::and, Formula::True, Formula::flatten_and)
            }
            Formula::Or(..) => {
                let mut parts = Vec::new();
                self.flatten_or(&mut parts);
                let mut kept: Vec<Formula> = Vec::new();
                for p in parts {
                    match p.simplify() {
                        Formula::False => {}
                        Formula::True => return Formula::True,
                        q => {
                            if !kept.contains(&q) {
                                kept.push(q);
                            }
                        }
                    }
                }
                rebuild_flat(kept, Formula::or, Formula::False, Formula::flatten_or)
            }
            Formula::Implies(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::True, y) => y,
                (Formula::False, _) | (_, Formula::True) => Formula::True,
                (x, Formula::False) => Formula::not(x).simplify(),
                (x, y) => Formula::implies(x, y),
            },
            Formula::Iff(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::True, y) | (y, Formula::True) => y,
                (Formula::False, y) | (y, Formula::False) => Formula::not(y).simplify(),
                (x, y) => Formula::iff(x, y),
            },
        }
    }

    fn flatten_and(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::And(a, b) => {
                a.flatten_and(out);
                b.flatten_and(out);
            }
            other => out.push(other.clone()),
        }
    }

    fn flatten_or(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::Or(a, b) => {
                a.flatten_or(out);
                b.flatten_or(out);
            }
            other => out.push(other.clone()),
        }
    }

    /// Clause form by distribution, over the formula's own atoms. No
    /// satisfiability check: contradictions need not yield the empty clause.
    pub(crate) fn clauses(&self) -> ClauseSet {
        cnf(self, true)
    }

    /// Equivalent clause set with tautologies and subsumed clauses removed.
    /// An unsatisfiable input yields exactly `{⊥}`.
    pub fn to_cnf(&self) -> ClauseSet {
        let cs = self.clauses();
        if crate::classical::clauses_satisfiable(&cs) {
            cs
        } else {
            BTreeSet::from([Clause::empty()])
        }
    }
}

fn rebuild_flat(
    kept: Vec<Formula>,
    join: fn(Formula, Formula) -> Formula,
    unit: Formula,
    flatten: fn(&Formula, &mut Vec<Formula>),
) -> Formula {
    // simplified members may themselves be chains of the same connective
    let mut flat = Vec::new();
    for k in kept {
        flatten(&k, &mut flat);
    }
    let mut uniq: Vec<Formula> = Vec::new();
    for f in flat {
        if !uniq.contains(&f) {
            uniq.push(f);
        }
    }
    uniq.into_iter().reduce(join).unwrap_or(unit)
}

fn cnf(f: &Formula, positive: bool) -> ClauseSet {
    match (f, positive) {
        (Formula::True, true) | (Formula::False, false) => ClauseSet::new(),
        (Formula::True, false) | (Formula::False, true) => BTreeSet::from([Clause::empty()]),
        (Formula::Atom(a), p) => {
            let l = if p { Literal::pos(a.clone()) } else { Literal::neg(a.clone()) };
            BTreeSet::from([Clause::unit(l)])
        }
        (Formula::Not(x), p) => cnf(x, !p),
        (Formula::And(a, b), true) => conj(cnf(a, true), cnf(b, true)),
        (Formula::And(a, b), false) => disj(&cnf(a, false), &cnf(b, false)),
        (Formula::Or(a, b), true) => disj(&cnf(a, true), &cnf(b, true)),
        (Formula::Or(a, b), false) => conj(cnf(a, false), cnf(b, false)),
        (Formula::Implies(a, b), true) => disj(&cnf(a, false), &cnf(b, true)),
        (Formula::Implies(a, b), false) => conj(cnf(a, true), cnf(b, false)),
        (Formula::Iff(a, b), true) => conj(disj(&cnf(a, false), &cnf(b, true)), disj(&cnf(a, true), &cnf(b, false))),
        (Formula::Iff(a, b), false) => conj(disj(&cnf(a, true), &cnf(b, true)), disj(&cnf(a, false), &cnf(b, false))),
    }
}

fn conj(mut a: ClauseSet, b: ClauseSet) -> ClauseSet {
    a.extend(b);
    reduce_subsumed(a)
}

fn disj(a: &ClauseSet, b: &ClauseSet) -> ClauseSet {
    let mut out = ClauseSet::new();
    for x in a {
        for y in b {
            let c = x.union(y);
            if !c.is_tautology() {
                out.insert(c);
            }
        }
    }
    reduce_subsumed(out)
}

/// Drop every clause strictly subsumed by another member.
pub fn reduce_subsumed(set: ClauseSet) -> ClauseSet {
    // ascending length order means a subsumer is always seen first
    let mut kept: Vec<Clause> = Vec::new();
    for c in set {
        if !kept.iter().any(|k| k.subsumes(&c)) {
            kept.push(c);
        }
    }
    kept.into_iter().collect()
}

// Printing: precedence ~ > & > | > -> > <->, the last two right-associative.

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) => 5,
        _ => 6,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        out.write_str("(")?;
        write_at(f, 0, out)?;
        return out.write_str(")");
    }
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Atom(a) => write!(out, "{a}"),
        Formula::Not(x) => {
            out.write_str("~")?;
            write_at(x, 5, out)
        }
        Formula::And(a, b) => {
            write_at(a, 4, out)?;
            out.write_str(" & ")?;
            write_at(b, 5, out)
        }
        Formula::Or(a, b) => {
            write_at(a, 3, out)?;
            out.write_str(" | ")?;
            write_at(b, 4, out)
        }
        Formula::Implies(a, b) => {
            write_at(a, 3, out)?;
            out.write_str(" -> ")?;
            write_at(b, 2, out)
        }
        Formula::Iff(a, b) => {
            write_at(a, 2, out)?;
            out.write_str(" <-> ")?;
            write_at(b, 1, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

/// Law-shaped consequence statements of modal depth at most one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Query {
    Classical(Formula),
    /// `antecedent -> [action] consequent`
    Box {
        action: String,
        antecedent: Formula,
        consequent: Formula,
    },
    /// `antecedent -> <action> true`
    Diamond {
        action: String,
        antecedent: Formula,
    },
}

impl Query {
    pub fn action(&self) -> Option<&str> {
        match self {
            Query::Classical(_) => None,
            Query::Box { action, .. } | Query::Diamond { action, .. } => Some(action),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        match self {
            Query::Classical(f) => f.atoms(),
            Query::Box { antecedent, consequent, .. } => {
                let mut s = antecedent.atoms();
                consequent.collect_atoms(&mut s);
                s
            }
            Query::Diamond { antecedent, .. } => antecedent.atoms(),
        }
    }

    pub fn inexecutability(action: &str, antecedent: Formula) -> Query {
        Query::Box { action: action.to_string(), antecedent, consequent: Formula::False }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Classical(x) => write!(f, "{x}"),
            Query::Box { action, antecedent, consequent } => {
                if *antecedent == Formula::True {
                    write!(f, "[{action}] {consequent}")
                } else {
                    write!(f, "{antecedent} => [{action}] {consequent}")
                }
            }
            Query::Diamond { action, antecedent } => {
                if *antecedent == Formula::True {
                    write!(f, "<{action}> true")
                } else {
                    write!(f, "{antecedent} => <{action}> true")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn literal_negation_is_involution() {
        let l = Literal::pos("p");
        assert_eq!(l.negate().negate(), l);
        assert_ne!(l.negate(), l);
    }

    #[test]
    fn cnf_of_implication() {
        let f = Formula::implies(a("walking"), a("alive"));
        let expected = BTreeSet::from([Clause::new([Literal::neg("walking"), Literal::pos("alive")])]);
        assert_eq!(f.to_cnf(), expected);
    }

    #[test]
    fn cnf_of_contradiction_is_empty_clause() {
        let f = Formula::and(a("p"), Formula::not(a("p")));
        assert_eq!(f.to_cnf(), BTreeSet::from([Clause::empty()]));
    }

    #[test]
    fn cnf_keeps_clausal_input() {
        let f = Formula::and(a("p1"), Formula::or(Formula::not(a("p1")), a("p2")));
        let expected =
            BTreeSet::from([Clause::unit(Literal::pos("p1")), Clause::new([Literal::neg("p1"), Literal::pos("p2")])]);
        assert_eq!(f.to_cnf(), expected);
    }

    #[test]
    fn atoms_examples() {
        assert_eq!(
            Formula::implies(a("walking"), a("alive")).atoms(),
            BTreeSet::from([Atom::new("walking"), Atom::new("alive")])
        );
        assert!(Formula::True.atoms().is_empty());
        assert_eq!(Formula::not(Formula::or(a("p"), a("p"))).atoms(), BTreeSet::from([Atom::new("p")]));
    }

    #[test]
    fn simplify_drops_constants_and_double_negation() {
        let f = Formula::not(Formula::and(Formula::and(Formula::True, Formula::True), Formula::not(a("alive"))));
        assert_eq!(f.simplify(), a("alive"));
        let g = Formula::not(Formula::and(Formula::and(a("hasGun"), Formula::True), Formula::not(Formula::False)));
        assert_eq!(g.simplify(), Formula::not(a("hasGun")));
        let h = Formula::and(a("x"), Formula::and(a("y"), a("x")));
        assert_eq!(h.simplify(), Formula::and(a("x"), a("y")));
    }

    #[test]
    fn printing_respects_associativity() {
        let left = Formula::and(Formula::and(a("a"), a("b")), a("c"));
        let right = Formula::and(a("a"), Formula::and(a("b"), a("c")));
        assert_eq!(left.to_string(), "a & b & c");
        assert_eq!(right.to_string(), "a & (b & c)");
        let imp = Formula::implies(a("a"), Formula::implies(a("b"), a("c")));
        assert_eq!(imp.to_string(), "a -> b -> c");
        let imp2 = Formula::implies(Formula::implies(a("a"), a("b")), a("c"));
        assert_eq!(imp2.to_string(), "(a -> b) -> c");
    }

    #[test]
    fn clause_order_is_by_length_first() {
        let e = Clause::empty();
        let u = Clause::unit(Literal::pos("z"));
        let b = Clause::new([Literal::pos("a"), Literal::pos("b")]);
        let mut v = vec![b.clone(), u.clone(), e.clone()];
        v.sort();
        assert_eq!(v, vec![e, u, b]);
    }
}
