//! Action theories: domain, per-action law sets, dependence relation,
//! the `.at` description language and well-formedness checks.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::classical::satisfiable;
use crate::parse::{Parser, Span, SyntaxError, Tok};
use crate::syntax::{Atom, Formula, Literal, Query};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{span}: undeclared fluent `{name}`")]
    UndeclaredFluent { name: String, span: Span },
    #[error("{span}: undeclared action `{name}`")]
    UndeclaredAction { name: String, span: Span },
    #[error("{span}: duplicate declaration of {what} `{name}`")]
    Duplicate { what: &'static str, name: String, span: Span },
    #[error("the domain declares no {0}")]
    EmptyDomain(&'static str),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub actions: Vec<String>,
    pub fluents: Vec<Atom>,
}

impl Domain {
    pub fn has_action(&self, a: &str) -> bool {
        self.actions.iter().any(|x| x == a)
    }

    pub fn has_fluent(&self, p: &Atom) -> bool {
        self.fluents.contains(p)
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.fluents.iter().flat_map(|p| [Literal::pos(p.clone()), Literal::neg(p.clone())])
    }
}

/// Pairs `(a, l)`: action `a` may make literal `l` true.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DependenceRelation {
    pairs: BTreeSet<(String, Literal)>,
}

impl DependenceRelation {
    pub fn new() -> DependenceRelation {
        DependenceRelation::default()
    }

    /// Every action depends on every literal.
    pub fn total(domain: &Domain) -> DependenceRelation {
        let mut d = DependenceRelation::new();
        for a in &domain.actions {
            for l in domain.literals() {
                d.insert(a, l);
            }
        }
        d
    }

    pub fn insert(&mut self, action: &str, l: Literal) -> bool {
        self.pairs.insert((action.to_string(), l))
    }

    pub fn remove(&mut self, action: &str, l: &Literal) -> bool {
        self.pairs.remove(&(action.to_string(), l.clone()))
    }

    pub fn depends(&self, action: &str, l: &Literal) -> bool {
        self.pairs.contains(&(action.to_string(), l.clone()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(String, Literal)> {
        self.pairs.iter()
    }

    pub fn literals_of<'a>(&'a self, action: &'a str) -> impl Iterator<Item = &'a Literal> + 'a {
        self.pairs.iter().filter(move |(a, _)| a == action).map(|(_, l)| l)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct StaticLaw {
    pub formula: Formula,
    pub span: Option<Span>,
}

/// `antecedent -> [a] consequent`
#[derive(Clone, Debug)]
pub struct EffectLaw {
    pub antecedent: Formula,
    pub consequent: Formula,
    pub span: Option<Span>,
}

/// Executability `φ -> <a> true` or inexecutability `φ -> [a] false`;
/// only the antecedent is stored.
#[derive(Clone, Debug)]
pub struct Precondition {
    pub antecedent: Formula,
    pub span: Option<Span>,
}

impl StaticLaw {
    pub fn new(formula: Formula) -> StaticLaw {
        StaticLaw { formula, span: None }
    }
}

impl EffectLaw {
    pub fn new(antecedent: Formula, consequent: Formula) -> EffectLaw {
        EffectLaw { antecedent, consequent, span: None }
    }
}

impl Precondition {
    pub fn new(antecedent: Formula) -> Precondition {
        Precondition { antecedent, span: None }
    }
}

// Source positions do not take part in equality.
impl PartialEq for StaticLaw {
    fn eq(&self, o: &StaticLaw) -> bool {
        self.formula == o.formula
    }
}
impl Eq for StaticLaw {}
impl PartialEq for EffectLaw {
    fn eq(&self, o: &EffectLaw) -> bool {
        self.antecedent == o.antecedent && self.consequent == o.consequent
    }
}
impl Eq for EffectLaw {}
impl PartialEq for Precondition {
    fn eq(&self, o: &Precondition) -> bool {
        self.antecedent == o.antecedent
    }
}
impl Eq for Precondition {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionLaws {
    pub effects: Vec<EffectLaw>,
    pub executabilities: Vec<Precondition>,
    pub inexecutabilities: Vec<Precondition>,
}

impl ActionLaws {
    pub fn is_empty(&self) -> bool {
        self.effects.is_empty() && self.executabilities.is_empty() && self.inexecutabilities.is_empty()
    }
}

/// Law kinds as a flat value, for listings and messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Law {
    Static(Formula),
    Effect { action: String, antecedent: Formula, consequent: Formula },
    Executability { action: String, antecedent: Formula },
    Inexecutability { action: String, antecedent: Formula },
}

impl Law {
    pub fn to_query(&self) -> Query {
        match self.clone() {
            Law::Static(f) => Query::Classical(f),
            Law::Effect { action, antecedent, consequent } => Query::Box { action, antecedent, consequent },
            Law::Executability { action, antecedent } => Query::Diamond { action, antecedent },
            Law::Inexecutability { action, antecedent } => Query::inexecutability(&action, antecedent),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Law::Static(_) => "static",
            Law::Effect { .. } => "effect",
            Law::Executability { .. } => "executability",
            Law::Inexecutability { .. } => "inexecutability",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_query())
    }
}

/// Which member of an action's law lists a direct consequence comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LawRef {
    Effect(usize),
    Inexecutability(usize),
}

/// A member of `consq(a)`: a box law, inexecutabilities having consequent `false`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxLaw {
    pub antecedent: Formula,
    pub consequent: Formula,
    pub source: LawRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionTheory {
    pub name: String,
    pub domain: Domain,
    pub statics: Vec<StaticLaw>,
    /// Indexed like `domain.actions`.
    pub actions: Vec<ActionLaws>,
    pub dependence: DependenceRelation,
}

impl ActionTheory {
    /// A theory with the given domain and no laws.
    pub fn empty(name: &str, actions: &[&str], fluents: &[&str]) -> ActionTheory {
        ActionTheory {
            name: name.to_string(),
            domain: Domain {
                actions: actions.iter().map(|s| s.to_string()).collect(),
                fluents: fluents.iter().map(|s| Atom::new(s)).collect(),
            },
            statics: Vec::new(),
            actions: vec![ActionLaws::default(); actions.len()],
            dependence: DependenceRelation::new(),
        }
    }

    pub fn action_index(&self, a: &str) -> Result<usize, TheoryError> {
        self.domain.actions.iter().position(|x| x == a).ok_or_else(|| TheoryError::UnknownAction(a.to_string()))
    }

    pub fn laws(&self, a: &str) -> Result<&ActionLaws, TheoryError> {
        Ok(&self.actions[self.action_index(a)?])
    }

    pub fn laws_mut(&mut self, a: &str) -> Result<&mut ActionLaws, TheoryError> {
        let i = self.action_index(a)?;
        Ok(&mut self.actions[i])
    }

    pub fn static_formulas(&self) -> Vec<Formula> {
        self.statics.iter().map(|s| s.formula.clone()).collect()
    }

    /// Effect laws first, then inexecutabilities (with consequent `false`).
    pub fn consq(&self, a: &str) -> Result<Vec<BoxLaw>, TheoryError> {
        let laws = self.laws(a)?;
        let mut out: Vec<BoxLaw> = laws
            .effects
            .iter()
            .enumerate()
            .map(|(i, e)| BoxLaw {
                antecedent: e.antecedent.clone(),
                consequent: e.consequent.clone(),
                source: LawRef::Effect(i),
            })
            .collect();
        out.extend(laws.inexecutabilities.iter().enumerate().map(|(i, x)| BoxLaw {
            antecedent: x.antecedent.clone(),
            consequent: Formula::False,
            source: LawRef::Inexecutability(i),
        }));
        Ok(out)
    }

    /// All laws in declaration order.
    pub fn all_laws(&self) -> Vec<Law> {
        let mut out: Vec<Law> = self.statics.iter().map(|s| Law::Static(s.formula.clone())).collect();
        for (a, laws) in self.domain.actions.iter().zip(&self.actions) {
            out.extend(self.action_laws_flat(a, laws));
        }
        out
    }

    fn action_laws_flat(&self, a: &str, laws: &ActionLaws) -> Vec<Law> {
        let mut out = Vec::new();
        for e in &laws.effects {
            out.push(Law::Effect {
                action: a.to_string(),
                antecedent: e.antecedent.clone(),
                consequent: e.consequent.clone(),
            });
        }
        for x in &laws.executabilities {
            out.push(Law::Executability { action: a.to_string(), antecedent: x.antecedent.clone() });
        }
        for x in &laws.inexecutabilities {
            out.push(Law::Inexecutability { action: a.to_string(), antecedent: x.antecedent.clone() });
        }
        out
    }

    /// Keep only the statics and the laws of `a` (domain and dependence unchanged).
    pub fn restrict_to(&self, a: &str) -> Result<ActionTheory, TheoryError> {
        let i = self.action_index(a)?;
        let mut t = self.clone();
        for (j, laws) in t.actions.iter_mut().enumerate() {
            if j != i {
                *laws = ActionLaws::default();
            }
        }
        Ok(t)
    }

    /// Copy keeping the selected law kinds; `action` limits action laws to one action.
    pub fn select(&self, sel: LawSelection, action: Option<&str>) -> Result<ActionTheory, TheoryError> {
        let keep = match action {
            Some(a) => Some(self.action_index(a)?),
            None => None,
        };
        let mut t = self.clone();
        if !sel.statics {
            t.statics.clear();
        }
        for (j, laws) in t.actions.iter_mut().enumerate() {
            if keep.is_some_and(|k| k != j) {
                *laws = ActionLaws::default();
                continue;
            }
            if !sel.effects {
                laws.effects.clear();
            }
            if !sel.executabilities {
                laws.executabilities.clear();
            }
            if !sel.inexecutabilities {
                laws.inexecutabilities.clear();
            }
        }
        Ok(t)
    }

    pub fn with_total_dependence(&self) -> ActionTheory {
        let mut t = self.clone();
        t.dependence = DependenceRelation::total(&self.domain);
        t
    }

    /// Check that every action and atom a query mentions is declared.
    pub fn check_query(&self, q: &Query) -> Result<(), TheoryError> {
        if let Some(a) = q.action() {
            self.action_index(a)?;
        }
        for p in q.atoms() {
            if !self.domain.has_fluent(&p) {
                return Err(TheoryError::UndeclaredFluent { name: p.to_string(), span: Span::default() });
            }
        }
        Ok(())
    }

    /// The theory in `.at` syntax. `parse_theory` reads it back to an equal theory.
    pub fn print(&self) -> String {
        self.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LawSelection {
    pub statics: bool,
    pub effects: bool,
    pub executabilities: bool,
    pub inexecutabilities: bool,
}

impl LawSelection {
    pub const ALL: LawSelection =
        LawSelection { statics: true, effects: true, executabilities: true, inexecutabilities: true };
    pub const NONE: LawSelection =
        LawSelection { statics: false, effects: false, executabilities: false, inexecutabilities: false };
}

impl fmt::Display for ActionTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theory {} {{", self.name)?;
        let fl: Vec<String> = self.domain.fluents.iter().map(|a| a.to_string()).collect();
        writeln!(f, "  fluents {};", fl.join(" "))?;
        writeln!(f, "  actions {};", self.domain.actions.join(" "))?;
        if !self.statics.is_empty() {
            writeln!(f, "  static {{")?;
            for s in &self.statics {
                writeln!(f, "    {};", s.formula)?;
            }
            writeln!(f, "  }}")?;
        }
        for (a, laws) in self.domain.actions.iter().zip(&self.actions) {
            let causes: Vec<String> = self.dependence.literals_of(a).map(|l| l.to_string()).collect();
            if laws.is_empty() && causes.is_empty() {
                writeln!(f, "  action {a} {{ }}")?;
                continue;
            }
            writeln!(f, "  action {a} {{")?;
            if !causes.is_empty() {
                writeln!(f, "    causes {};", causes.join(", "))?;
            }
            for e in &laws.effects {
                if e.antecedent == Formula::True {
                    writeln!(f, "    effect {};", e.consequent)?;
                } else {
                    writeln!(f, "    effect {} => {};", e.antecedent, e.consequent)?;
                }
            }
            for x in &laws.executabilities {
                writeln!(f, "    executable {};", x.antecedent)?;
            }
            for x in &laws.inexecutabilities {
                writeln!(f, "    inexecutable {};", x.antecedent)?;
            }
            writeln!(f, "  }}")?;
        }
        writeln!(f, "}}")
    }
}

/// Read a theory written in the `.at` language.
/// An `action` block in source order: name, position, laws and `causes` literals.
type ActionBlock = (String, Span, ActionLaws, Vec<(Literal, Span)>);

pub fn parse_theory(text: &str) -> Result<ActionTheory, TheoryError> {
    let mut p = Parser::new(text)?;
    if !p.is_keyword("theory") {
        return Err(SyntaxError { span: p.span(), message: format!("expected `theory`, found {}", p.peek()) }.into());
    }
    p.bump();
    let (name, _) = p.expect_ident("a theory name")?;
    p.expect(&Tok::LBrace)?;

    let mut fluents: Vec<(Atom, Span)> = Vec::new();
    let mut actions: Vec<(String, Span)> = Vec::new();
    let mut statics: Vec<StaticLaw> = Vec::new();
    let mut blocks: Vec<ActionBlock> = Vec::new();
    let mut formula_spans: Vec<(Formula, Span)> = Vec::new();

    loop {
        let span = p.span();
        match p.peek().clone() {
            Tok::RBrace => {
                p.bump();
                break;
            }
            Tok::Ident(kw) if kw == "fluents" => {
                p.bump();
                while !p.eat(&Tok::Semi) {
                    p.eat(&Tok::Comma);
                    if matches!(p.peek(), Tok::Semi) {
                        continue;
                    }
                    let (n, s) = p.expect_ident("a fluent name")?;
                    if fluents.iter().any(|(a, _)| a.name() == n) {
                        return Err(TheoryError::Duplicate { what: "fluent", name: n, span: s });
                    }
                    fluents.push((Atom::new(&n), s));
                }
            }
            Tok::Ident(kw) if kw == "actions" => {
                p.bump();
                while !p.eat(&Tok::Semi) {
                    p.eat(&Tok::Comma);
                    if matches!(p.peek(), Tok::Semi) {
                        continue;
                    }
                    let (n, s) = p.expect_ident("an action name")?;
                    if actions.iter().any(|(a, _)| *a == n) {
                        return Err(TheoryError::Duplicate { what: "action", name: n, span: s });
                    }
                    actions.push((n, s));
                }
            }
            Tok::Ident(kw) if kw == "static" => {
                p.bump();
                p.expect(&Tok::LBrace)?;
                while !p.eat(&Tok::RBrace) {
                    let s = p.span();
                    let f = p.formula()?;
                    p.expect(&Tok::Semi)?;
                    formula_spans.push((f.clone(), s));
                    statics.push(StaticLaw { formula: f, span: Some(s) });
                }
            }
            Tok::Ident(kw) if kw == "action" => {
                p.bump();
                let (a, s) = p.expect_ident("an action name")?;
                if blocks.iter().any(|(b, ..)| *b == a) {
                    return Err(TheoryError::Duplicate { what: "action block", name: a, span: s });
                }
                p.expect(&Tok::LBrace)?;
                let mut laws = ActionLaws::default();
                let mut causes = Vec::new();
                while !p.eat(&Tok::RBrace) {
                    let st = p.span();
                    let kw = match p.peek().clone() {
                        Tok::Ident(k) => k,
                        other => {
                            return Err(
                                SyntaxError { span: st, message: format!("expected a law, found {other}") }.into()
                            )
                        }
                    };
                    p.bump();
                    match kw.as_str() {
                        "causes" => loop {
                            causes.push(p.literal()?);
                            if !p.eat(&Tok::Comma) {
                                break;
                            }
                        },
                        "effect" => {
                            let first = p.formula()?;
                            formula_spans.push((first.clone(), st));
                            let law = if p.eat(&Tok::FatArrow) {
                                let s2 = p.span();
                                let second = p.formula()?;
                                formula_spans.push((second.clone(), s2));
                                EffectLaw { antecedent: first, consequent: second, span: Some(st) }
                            } else {
                                EffectLaw { antecedent: Formula::True, consequent: first, span: Some(st) }
                            };
                            laws.effects.push(law);
                        }
                        "executable" | "inexecutable" => {
                            let f = p.formula()?;
                            formula_spans.push((f.clone(), st));
                            let x = Precondition { antecedent: f, span: Some(st) };
                            if kw == "executable" {
                                laws.executabilities.push(x);
                            } else {
                                laws.inexecutabilities.push(x);
                            }
                        }
                        other => {
                            return Err(SyntaxError {
                                span: st,
                                message: format!(
                                    "unknown statement `{other}` (expected causes, effect, executable or inexecutable)"
                                ),
                            }
                            .into())
                        }
                    }
                    p.expect(&Tok::Semi)?;
                }
                blocks.push((a, s, laws, causes));
            }
            other => {
                return Err(SyntaxError {
                    span,
                    message: format!("expected fluents, actions, static or action, found {other}"),
                }
                .into())
            }
        }
    }
    if !matches!(p.peek(), Tok::Eof) {
        return Err(SyntaxError { span: p.span(), message: format!("unexpected {} after theory", p.peek()) }.into());
    }
    if fluents.is_empty() {
        return Err(TheoryError::EmptyDomain("fluents"));
    }
    if actions.is_empty() {
        return Err(TheoryError::EmptyDomain("actions"));
    }

    let domain = Domain {
        actions: actions.iter().map(|(a, _)| a.clone()).collect(),
        fluents: fluents.iter().map(|(a, _)| a.clone()).collect(),
    };
    for (f, s) in &formula_spans {
        if let Some(bad) = f.atoms().into_iter().find(|a| !domain.has_fluent(a)) {
            return Err(TheoryError::UndeclaredFluent { name: bad.to_string(), span: *s });
        }
    }
    let mut theory = ActionTheory {
        name,
        domain,
        statics,
        actions: vec![ActionLaws::default(); actions.len()],
        dependence: DependenceRelation::new(),
    };
    for (a, s, laws, causes) in blocks {
        let i = theory.action_index(&a).map_err(|_| TheoryError::UndeclaredAction { name: a.clone(), span: s })?;
        for (l, ls) in causes {
            if !theory.domain.has_fluent(&l.atom) {
                return Err(TheoryError::UndeclaredFluent { name: l.atom.to_string(), span: ls });
            }
            theory.dependence.insert(&a, l);
        }
        theory.actions[i] = laws;
    }
    Ok(theory)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    InconsistentStatic,
    InconsistentAntecedent,
    InconsistentConsequent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFormednessViolation {
    pub law: Law,
    pub span: Option<Span>,
    pub kind: ViolationKind,
    pub rationale: String,
}

impl fmt::Display for WellFormednessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(f, "{s}: {} law `{}`: {}", self.law.kind_name(), self.law, self.rationale),
            None => write!(f, "{} law `{}`: {}", self.law.kind_name(), self.law, self.rationale),
        }
    }
}

/// One record per law whose formulas are not classically consistent.
pub fn validate(t: &ActionTheory) -> Vec<WellFormednessViolation> {
    let consistent = |f: &Formula| satisfiable(std::slice::from_ref(f));
    let mut out = Vec::new();
    for s in &t.statics {
        if !consistent(&s.formula) {
            out.push(WellFormednessViolation {
                law: Law::Static(s.formula.clone()),
                span: s.span,
                kind: ViolationKind::InconsistentStatic,
                rationale: "static law is unsatisfiable; it admits no state at all".into(),
            });
        }
    }
    for (a, laws) in t.domain.actions.iter().zip(&t.actions) {
        for e in &laws.effects {
            let law =
                Law::Effect { action: a.clone(), antecedent: e.antecedent.clone(), consequent: e.consequent.clone() };
            if !consistent(&e.antecedent) {
                out.push(WellFormednessViolation {
                    law: law.clone(),
                    span: e.span,
                    kind: ViolationKind::InconsistentAntecedent,
                    rationale: "effect antecedent is unsatisfiable; the law never applies".into(),
                });
            }
            if !consistent(&e.consequent) {
                out.push(WellFormednessViolation {
                    law,
                    span: e.span,
                    kind: ViolationKind::InconsistentConsequent,
                    rationale: format!(
                        "effect consequent is unsatisfiable; declare it as `inexecutable {}` instead",
                        e.antecedent
                    ),
                });
            }
        }
        for (xs, exec) in [(&laws.executabilities, true), (&laws.inexecutabilities, false)] {
            for x in xs {
                if !consistent(&x.antecedent) {
                    let law = if exec {
                        Law::Executability { action: a.clone(), antecedent: x.antecedent.clone() }
                    } else {
                        Law::Inexecutability { action: a.clone(), antecedent: x.antecedent.clone() }
                    };
                    out.push(WellFormednessViolation {
                        law,
                        span: x.span,
                        kind: ViolationKind::InconsistentAntecedent,
                        rationale: "antecedent is unsatisfiable; the law never applies".into(),
                    });
                }
            }
        }
    }
    out
}
