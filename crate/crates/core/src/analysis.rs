//! Implicit static and inexecutability laws, and postulate verdicts.
//!
//! Each verdict that has both a syntactic and a semantic route computes
//! both and fails with [`AnalysisError::Disagreement`] if they differ.

use std::fmt;

use thiserror::Error;

use crate::classical::{entails, new_cons, satisfiable, Valuation};
use crate::kripke::{big_model, entails_dep, is_dep_model, prune_fixpoint, KripkeError, PrunedFrame};
use crate::syntax::{Clause, Formula, Query};
use crate::theory::{validate, ActionTheory, LawRef, TheoryError};

pub const DEFAULT_SUBSET_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("action `{action}` has {count} laws to combine, above the subset cap of {cap}")]
    TooManySubsets { action: String, count: usize, cap: usize },
    #[error("theory is not well formed ({0} violations); run validation first")]
    IllFormed(usize),
    #[error("internal error: syntactic and semantic checks of {postulate} ({scope}) disagree: {detail}")]
    Disagreement { postulate: Postulate, scope: Scope, detail: String },
    #[error("postulate {postulate} cannot be checked at scope {scope}")]
    InvalidScope { postulate: Postulate, scope: Scope },
}

impl AnalysisError {
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            AnalysisError::TooManySubsets { .. }
                | AnalysisError::Kripke(KripkeError::FrameTooLarge { .. })
                | AnalysisError::Kripke(KripkeError::EnumerationBounds { .. })
                | AnalysisError::Kripke(KripkeError::Engine(crate::classical::EngineError::TooManyAtoms { .. }))
        )
    }
}

/// Base of the `NewCons` computation in the static-law search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NewConsBase {
    /// Always the original static laws.
    #[default]
    Literal,
    /// The static laws plus everything found in earlier rounds.
    Grow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub newcons_base: NewConsBase,
    pub subset_cap: usize,
}

impl Default for Options {
    fn default() -> Options {
        Options { newcons_base: NewConsBase::Literal, subset_cap: DEFAULT_SUBSET_CAP }
    }
}

/// `S ∪ {φ} ∪ {¬α : α ∈ alphas}` is unsatisfiable.
fn covered(statics: &[Formula], alphas: &[Formula], phi: &Formula) -> bool {
    let mut fs = statics.to_vec();
    fs.push(phi.clone());
    fs.extend(alphas.iter().map(|a| Formula::not(a.clone())));
    !satisfiable(&fs)
}

/// `S, I_a ⊨ φ -> [a] false` in plain modal logic, given the antecedents of `I_a`.
pub fn pdl_entails_inexec(statics: &[Formula], inexecs: &[Formula], phi: &Formula) -> bool {
    covered(statics, inexecs, phi)
}

/// `S, X_a ⊨ φ -> <a> true` in plain modal logic, given the antecedents of `X_a`.
pub fn pdl_entails_exec(statics: &[Formula], execs: &[Formula], phi: &Formula) -> bool {
    covered(statics, execs, phi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicitStaticFinding {
    pub action: String,
    /// The simplified law.
    pub formula: Formula,
    /// `¬(φ ∧ φ_C ∧ ¬χ)` as built.
    pub raw: Formula,
    pub exec_index: usize,
    pub exec: Formula,
    /// Members of `consq(a)` combined, by position in `consq(a)`.
    pub subset: Vec<LawRef>,
    pub mask: u32,
    pub clause: Clause,
    /// 1-based.
    pub round: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicitInexecFinding {
    pub action: String,
    /// Simplified antecedent of the law `antecedent -> [a] false`.
    pub antecedent: Formula,
    pub raw: Formula,
    /// Indices into the effect laws of the action.
    pub subset: Vec<usize>,
    pub mask: u32,
    pub clause: Clause,
}

impl ImplicitInexecFinding {
    pub fn query(&self) -> Query {
        Query::inexecutability(&self.action, self.antecedent.clone())
    }
}

fn check_well_formed(t: &ActionTheory) -> Result<(), AnalysisError> {
    let v = validate(t);
    if v.is_empty() {
        Ok(())
    } else {
        Err(AnalysisError::IllFormed(v.len()))
    }
}

fn literals_independent(t: &ActionTheory, a: &str, chi: &Clause) -> bool {
    chi.literals().all(|l| !t.dependence.depends(a, l))
}

/// Search for implicit static laws induced by the executabilities of `a`.
pub fn implicit_static_laws(
    t: &ActionTheory,
    a: &str,
    opts: &Options,
) -> Result<Vec<ImplicitStaticFinding>, AnalysisError> {
    check_well_formed(t)?;
    let consq = t.consq(a)?;
    if consq.len() > opts.subset_cap {
        return Err(AnalysisError::TooManySubsets { action: a.to_string(), count: consq.len(), cap: opts.subset_cap });
    }
    let execs: Vec<Formula> = t.laws(a)?.executabilities.iter().map(|x| x.antecedent.clone()).collect();
    let s = t.static_formulas();

    // per subset: (mask, φ_C, ψ_C), skipping S-inconsistent antecedents
    let mut subsets = Vec::new();
    for mask in 1u32..(1u32 << consq.len()) {
        let members: Vec<usize> = (0..consq.len()).filter(|i| mask >> i & 1 == 1).collect();
        let phi_c = Formula::conjunction(members.iter().map(|&i| consq[i].antecedent.clone()));
        let mut check = s.clone();
        check.push(phi_c.clone());
        if !satisfiable(&check) {
            continue;
        }
        let psi_c = Formula::conjunction(members.iter().map(|&i| consq[i].consequent.clone()));
        subsets.push((mask, members, phi_c, psi_c));
    }

    let mut found: Vec<ImplicitStaticFinding> = Vec::new();
    let mut istar: Vec<Formula> = Vec::new();
    let mut round = 0;
    loop {
        round += 1;
        let mut step = Vec::new();
        let mut base = s.clone();
        if opts.newcons_base == NewConsBase::Grow {
            base.extend(istar.iter().cloned());
        }
        for (xi, phi) in execs.iter().enumerate() {
            for (mask, members, phi_c, psi_c) in &subsets {
                for chi in new_cons(&base, psi_c) {
                    if !literals_independent(t, a, &chi) {
                        continue;
                    }
                    let neg_chi = Formula::not(chi.to_formula());
                    let mut test = s.clone();
                    test.extend(istar.iter().cloned());
                    test.push(phi.clone());
                    test.push(phi_c.clone());
                    test.push(neg_chi.clone());
                    if !satisfiable(&test) {
                        continue;
                    }
                    let raw = Formula::not(Formula::and(Formula::and(phi.clone(), phi_c.clone()), neg_chi));
                    step.push(ImplicitStaticFinding {
                        action: a.to_string(),
                        formula: raw.simplify(),
                        raw,
                        exec_index: xi,
                        exec: phi.clone(),
                        subset: members.iter().map(|&i| consq[i].source).collect(),
                        mask: *mask,
                        clause: chi,
                        round,
                    });
                }
            }
        }
        if step.is_empty() {
            break;
        }
        istar.extend(step.iter().map(|f| f.raw.clone()));
        found.extend(step);
    }
    Ok(found)
}

/// The found laws without repeats or members implied by `S` and the rest.
pub fn reduced_static_laws(t: &ActionTheory, findings: &[ImplicitStaticFinding]) -> Vec<Formula> {
    let mut kept: Vec<Formula> = Vec::new();
    for f in findings {
        if !kept.contains(&f.formula) {
            kept.push(f.formula.clone());
        }
    }
    let s = t.static_formulas();
    let mut i = 0;
    while i < kept.len() {
        let mut others = s.clone();
        others.extend(kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()));
        if entails(&others, &kept[i]) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

/// Search for implicit inexecutability laws of `a`. Complete only when the
/// theory has no implicit static laws for `a`.
pub fn implicit_inexec_laws(
    t: &ActionTheory,
    a: &str,
    opts: &Options,
) -> Result<Vec<ImplicitInexecFinding>, AnalysisError> {
    check_well_formed(t)?;
    let laws = t.laws(a)?;
    let n = laws.effects.len();
    if n > opts.subset_cap {
        return Err(AnalysisError::TooManySubsets { action: a.to_string(), count: n, cap: opts.subset_cap });
    }
    let s = t.static_formulas();
    let inexecs: Vec<Formula> = laws.inexecutabilities.iter().map(|x| x.antecedent.clone()).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let phi_e = Formula::conjunction(members.iter().map(|&i| laws.effects[i].antecedent.clone()));
        let mut check = s.clone();
        check.push(phi_e.clone());
        if !satisfiable(&check) {
            continue;
        }
        let psi_e = Formula::conjunction(members.iter().map(|&i| laws.effects[i].consequent.clone()));
        for chi in new_cons(&s, &psi_e) {
            if !literals_independent(t, a, &chi) {
                continue;
            }
            let raw = Formula::and(phi_e.clone(), Formula::not(chi.to_formula()));
            if pdl_entails_inexec(&s, &inexecs, &raw) {
                continue;
            }
            out.push(ImplicitInexecFinding {
                action: a.to_string(),
                antecedent: raw.simplify(),
                raw,
                subset: members.clone(),
                mask,
                clause: chi,
            });
        }
    }
    Ok(out)
}

/// Antecedents of the found laws without repeats or members derivable from the rest.
pub fn reduced_inexec_laws(
    t: &ActionTheory,
    findings: &[ImplicitInexecFinding],
) -> Result<Vec<Formula>, AnalysisError> {
    let mut kept: Vec<Formula> = Vec::new();
    for f in findings {
        if !kept.contains(&f.antecedent) {
            kept.push(f.antecedent.clone());
        }
    }
    let s = t.static_formulas();
    let action = match findings.first() {
        Some(f) => f.action.clone(),
        None => return Ok(kept),
    };
    let stated: Vec<Formula> = t.laws(&action)?.inexecutabilities.iter().map(|x| x.antecedent.clone()).collect();
    let mut i = 0;
    while i < kept.len() {
        let mut others = stated.clone();
        others.extend(kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()));
        if pdl_entails_inexec(&s, &others, &kept[i]) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(kept)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Postulate {
    PC,
    PS,
    PI,
    /// Weak PI, exempting contexts the theory refutes.
    PIWeak,
    PX,
    /// No unattainable effects.
    PBottom,
    /// Maximal executability.
    PXPlus,
    PCStar,
    PSStar,
    PIStar,
    PXStar,
}

impl Postulate {
    pub const ALL: [Postulate; 11] = [
        Postulate::PC,
        Postulate::PS,
        Postulate::PI,
        Postulate::PIWeak,
        Postulate::PX,
        Postulate::PBottom,
        Postulate::PXPlus,
        Postulate::PCStar,
        Postulate::PSStar,
        Postulate::PIStar,
        Postulate::PXStar,
    ];

    /// What `check` runs when no list is given.
    pub const DEFAULT: [Postulate; 9] = [
        Postulate::PC,
        Postulate::PS,
        Postulate::PI,
        Postulate::PX,
        Postulate::PBottom,
        Postulate::PCStar,
        Postulate::PSStar,
        Postulate::PIStar,
        Postulate::PXStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Postulate::PC => "PC",
            Postulate::PS => "PS",
            Postulate::PI => "PI",
            Postulate::PIWeak => "PI'",
            Postulate::PX => "PX",
            Postulate::PBottom => "Pbot",
            Postulate::PXPlus => "PX+",
            Postulate::PCStar => "PC*",
            Postulate::PSStar => "PS*",
            Postulate::PIStar => "PI*",
            Postulate::PXStar => "PX*",
        }
    }

    pub fn parse(s: &str) -> Option<Postulate> {
        let s = s.trim();
        let alias = match s {
            "PIweak" | "PI-weak" => "PI'",
            "PX-plus" | "PXplus" => "PX+",
            "P_bot" | "Pbottom" | "P-bot" => "Pbot",
            other => other,
        };
        Postulate::ALL.iter().copied().find(|p| p.name().eq_ignore_ascii_case(alias))
    }

    pub fn is_theory_wide(self) -> bool {
        matches!(self, Postulate::PCStar | Postulate::PSStar | Postulate::PIStar | Postulate::PXStar)
    }
}

impl fmt::Display for Postulate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Action(String),
    Theory,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Action(a) => f.write_str(a),
            Scope::Theory => f.write_str("theory"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Syntactic,
    Semantic,
    Both,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Syntactic => "syntactic",
            Method::Semantic => "semantic",
            Method::Both => "both",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Satisfied,
    Violated,
    BlockedBy(Postulate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Static(ImplicitStaticFinding),
    Inexec(ImplicitInexecFinding),
    /// A valuation, rendered over the fluent order, with what goes wrong there.
    State {
        valuation: String,
        reason: String,
    },
    /// A stated law that breaks the postulate.
    Law(String),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Static(s) => write!(f, "{}", s.formula),
            Witness::Inexec(i) => write!(f, "{}", i.query()),
            Witness::State { valuation, reason } => write!(f, "{valuation}: {reason}"),
            Witness::Law(l) => f.write_str(l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostulateVerdict {
    pub postulate: Postulate,
    pub scope: Scope,
    pub status: Status,
    pub method: Method,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl PostulateVerdict {
    pub fn satisfied(&self) -> bool {
        self.status == Status::Satisfied
    }

    fn new(postulate: Postulate, scope: Scope, ok: bool, method: Method, witnesses: Vec<Witness>) -> PostulateVerdict {
        PostulateVerdict {
            postulate,
            scope,
            status: if ok { Status::Satisfied } else { Status::Violated },
            method,
            witnesses,
            notes: Vec::new(),
        }
    }
}

fn state(frame: &PrunedFrame, v: Valuation, reason: &str) -> Witness {
    Witness::State { valuation: frame.universe().describe(v), reason: reason.to_string() }
}

/// Valuations of `Val(S)` that are pruned or have no `a`-successor and satisfy no stated inexecutability.
fn uncovered_dead_ends(frame: &PrunedFrame, a: &str) -> Vec<Valuation> {
    frame
        .initial()
        .iter()
        .copied()
        .filter(|&v| (!frame.contains(v) || frame.successors(a, v).is_empty()) && !frame.inexec_applies(a, v))
        .collect()
}

fn disagreement(p: Postulate, scope: &Scope, detail: String) -> AnalysisError {
    AnalysisError::Disagreement { postulate: p, scope: scope.clone(), detail }
}

/// Decide one postulate. Starred postulates take `Scope::Theory`, the rest an action.
pub fn check_postulate(
    t: &ActionTheory,
    p: Postulate,
    scope: &Scope,
    opts: &Options,
) -> Result<PostulateVerdict, AnalysisError> {
    check_well_formed(t)?;
    let action = match (scope, p.is_theory_wide()) {
        (Scope::Action(a), false) => {
            t.action_index(a)?;
            Some(a.as_str())
        }
        (Scope::Theory, true) => None,
        _ => return Err(AnalysisError::InvalidScope { postulate: p, scope: scope.clone() }),
    };
    let sc = scope.clone();
    match (p, action) {
        (Postulate::PC, Some(a)) => {
            let frame = prune_fixpoint(&t.restrict_to(a)?)?;
            Ok(PostulateVerdict::new(p, sc, !frame.is_empty(), Method::Semantic, Vec::new()))
        }
        (Postulate::PCStar, None) => {
            let frame = prune_fixpoint(t)?;
            Ok(PostulateVerdict::new(p, sc, !frame.is_empty(), Method::Semantic, Vec::new()))
        }
        (Postulate::PS, Some(a)) => check_ps(t, a, opts),
        (Postulate::PSStar, None) => {
            let mut witnesses = Vec::new();
            let mut all = true;
            for a in &t.domain.actions {
                let v = check_ps(t, a, opts)?;
                all &= v.satisfied();
                witnesses.extend(v.witnesses);
            }
            let frame = prune_fixpoint(t)?;
            let semantic = frame.surviving().len() == frame.initial().len();
            if semantic != all {
                return Err(disagreement(
                    p,
                    &sc,
                    format!("per-action PS gives {all}, whole-theory frame gives {semantic}"),
                ));
            }
            Ok(PostulateVerdict::new(p, sc, all, Method::Both, witnesses))
        }
        (Postulate::PI, Some(a)) => {
            let ps = check_ps(t, a, opts)?;
            if !ps.satisfied() {
                let mut v = PostulateVerdict::new(p, sc, false, Method::Syntactic, Vec::new());
                v.status = Status::BlockedBy(Postulate::PS);
                v.notes.push(
                    "implicit static laws remain, so the inexecutability search may miss laws; repair PS first".into(),
                );
                return Ok(v);
            }
            let found = implicit_inexec_laws(t, a, opts)?;
            let frame = prune_fixpoint(&t.restrict_to(a)?)?;
            let dead = uncovered_dead_ends(&frame, a);
            if found.is_empty() != dead.is_empty() {
                return Err(disagreement(
                    p,
                    &sc,
                    format!("{} syntactic findings but {} uncovered dead-end valuations", found.len(), dead.len()),
                ));
            }
            Ok(PostulateVerdict::new(
                p,
                sc,
                found.is_empty(),
                Method::Both,
                found.into_iter().map(Witness::Inexec).collect(),
            ))
        }
        (Postulate::PIStar, None) => {
            let frame = prune_fixpoint(t)?;
            let mut witnesses = Vec::new();
            for a in &t.domain.actions {
                for v in uncovered_dead_ends(&frame, a) {
                    witnesses.push(state(
                        &frame,
                        v,
                        &format!("`{a}` cannot be executed here but no inexecutability for it applies"),
                    ));
                }
            }
            let ok = witnesses.is_empty();
            let ps_star = frame.surviving().len() == frame.initial().len();
            let mut method = Method::Semantic;
            let mut notes = Vec::new();
            if ps_star {
                let mut syntactic = true;
                for a in &t.domain.actions {
                    syntactic &= implicit_inexec_laws(t, a, opts)?.is_empty();
                }
                if syntactic != ok {
                    return Err(disagreement(
                        p,
                        &sc,
                        format!("per-action searches give {syntactic}, frame gives {ok}"),
                    ));
                }
                method = Method::Both;
            } else {
                notes.push(
                    "PS* fails, so the per-action inexecutability searches are not conclusive; semantic verdict only"
                        .into(),
                );
            }
            let mut v = PostulateVerdict::new(p, sc, ok, method, witnesses);
            v.notes = notes;
            Ok(v)
        }
        (Postulate::PIWeak, Some(a)) => {
            let frame = prune_fixpoint(&t.restrict_to(a)?)?;
            // a refuted valuation only matters together with a live dead end
            let live_dead_end = frame.surviving().iter().any(|&v| frame.successors(a, v).is_empty());
            let mut witnesses = Vec::new();
            for v in uncovered_dead_ends(&frame, a) {
                if frame.contains(v) {
                    witnesses.push(state(&frame, v, "no successor and no applicable inexecutability"));
                } else if live_dead_end {
                    witnesses.push(state(&frame, v, "refuted valuation not covered by an inexecutability"));
                }
            }
            let mut v = PostulateVerdict::new(p, sc, witnesses.is_empty(), Method::Semantic, witnesses);
            v.notes.push("semantic check only; this decision procedure is an extrapolation".into());
            Ok(v)
        }
        (Postulate::PX, Some(a)) => {
            let frame = prune_fixpoint(&t.restrict_to(a)?)?;
            let witnesses: Vec<Witness> = frame
                .initial()
                .iter()
                .copied()
                .filter(|&v| !frame.contains(v) && !frame.exec_applies(a, v))
                .map(|v| state(&frame, v, "refuted valuation where no executability applies"))
                .collect();
            Ok(PostulateVerdict::new(p, sc, witnesses.is_empty(), Method::Semantic, witnesses))
        }
        (Postulate::PXStar, None) => {
            let frame = prune_fixpoint(t)?;
            let mut witnesses = Vec::new();
            for a in &t.domain.actions {
                for &v in frame.initial() {
                    if !frame.contains(v) && !frame.exec_applies(a, v) {
                        witnesses.push(state(
                            &frame,
                            v,
                            &format!("refuted valuation where no executability of `{a}` applies"),
                        ));
                    }
                }
            }
            Ok(PostulateVerdict::new(p, sc, witnesses.is_empty(), Method::Semantic, witnesses))
        }
        (Postulate::PBottom, Some(a)) => {
            let mut witnesses = Vec::new();
            for e in &t.laws(a)?.effects {
                if entails_dep(t, &Query::inexecutability(a, e.antecedent.clone()))? {
                    let law = Query::Box {
                        action: a.to_string(),
                        antecedent: e.antecedent.clone(),
                        consequent: e.consequent.clone(),
                    };
                    witnesses.push(Witness::Law(format!("{law} can never take effect")));
                }
            }
            Ok(PostulateVerdict::new(p, sc, witnesses.is_empty(), Method::Semantic, witnesses))
        }
        (Postulate::PXPlus, Some(a)) => {
            let frame = prune_fixpoint(&t.restrict_to(a)?)?;
            let witnesses: Vec<Witness> = frame
                .surviving()
                .iter()
                .copied()
                .filter(|&v| !frame.successors(a, v).is_empty() && !frame.exec_applies(a, v))
                .map(|v| state(&frame, v, "executable here but no executability law says so"))
                .collect();
            let mut v = PostulateVerdict::new(p, sc, witnesses.is_empty(), Method::Semantic, witnesses);
            v.notes.push("checked per valuation; disjunctive contexts are not quantified over".into());
            Ok(v)
        }
        _ => Err(AnalysisError::InvalidScope { postulate: p, scope: sc }),
    }
}

fn check_ps(t: &ActionTheory, a: &str, opts: &Options) -> Result<PostulateVerdict, AnalysisError> {
    let scope = Scope::Action(a.to_string());
    let found = implicit_static_laws(t, a, opts)?;
    let ta = t.restrict_to(a)?;
    let big = is_dep_model(&big_model(&ta)?, &ta)?;
    let frame = prune_fixpoint(&ta)?;
    let unpruned = frame.surviving().len() == frame.initial().len();
    if found.is_empty() != big || big != unpruned {
        return Err(disagreement(
            Postulate::PS,
            &scope,
            format!("search found {} laws, big model is a model: {big}, nothing pruned: {unpruned}", found.len()),
        ));
    }
    Ok(PostulateVerdict::new(Postulate::PS, scope, big, Method::Both, found.into_iter().map(Witness::Static).collect()))
}

/// An effect whose context overlaps a stated inexecutability: in the
/// overlap the effect is implied yet the action is impossible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectOverlap {
    pub action: String,
    pub context: Formula,
    pub effect: Query,
    pub inexecutable: bool,
}

pub fn effect_overlaps(t: &ActionTheory) -> Result<Vec<EffectOverlap>, AnalysisError> {
    let s = t.static_formulas();
    let mut out = Vec::new();
    for (a, laws) in t.domain.actions.iter().zip(&t.actions) {
        for x in &laws.inexecutabilities {
            for e in &laws.effects {
                let context = Formula::and(x.antecedent.clone(), e.antecedent.clone()).simplify();
                let mut fs = s.clone();
                fs.push(context.clone());
                if !satisfiable(&fs) {
                    continue;
                }
                let inexecutable = entails_dep(t, &Query::inexecutability(a, context.clone()))?;
                out.push(EffectOverlap {
                    action: a.clone(),
                    effect: Query::Box {
                        action: a.clone(),
                        antecedent: context.clone(),
                        consequent: e.consequent.clone(),
                    },
                    context,
                    inexecutable,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;
    use crate::theory::parse_theory;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    const YALE: &str = "theory yale {
  fluents walking alive loaded;
  actions tease shoot load;
  static { walking -> alive; }
  action tease { causes walking; effect walking; executable true; inexecutable ~alive; }
  action shoot { causes ~loaded, ~alive, ~walking; effect loaded => ~alive; }
  action load { }
}";

    #[test]
    fn pdl_reductions() {
        assert!(pdl_entails_inexec(&[], &[f("p")], &f("p")));
        assert!(!pdl_entails_inexec(&[f("walking -> alive")], &[], &f("~alive")));
        assert!(pdl_entails_inexec(&[f("p -> q")], &[f("q")], &f("p")));
        assert!(pdl_entails_exec(&[], &[Formula::True], &f("anything")));
        assert!(!pdl_entails_exec(&[], &[f("hasGun")], &f("loaded")));
        assert!(pdl_entails_exec(&[f("walking -> alive")], &[f("alive")], &f("walking")));
    }

    #[test]
    fn yale_static_law_search() {
        let t = parse_theory(YALE).unwrap();
        let found = implicit_static_laws(&t, "tease", &Options::default()).unwrap();
        assert!(!found.is_empty());
        assert!(found.iter().all(|x| x.formula == f("alive") && x.round == 1));
        assert_eq!(found[0].clause.to_string(), "alive");
        assert_eq!(found[0].raw, f("~(true & true & ~alive)"));
        assert_eq!(reduced_static_laws(&t, &found), vec![f("alive")]);
        assert!(implicit_static_laws(&t, "shoot", &Options::default()).unwrap().is_empty());
    }

    #[test]
    fn no_executabilities_no_static_laws() {
        let mut t = parse_theory(YALE).unwrap();
        t.laws_mut("tease").unwrap().executabilities.clear();
        assert!(implicit_static_laws(&t, "tease", &Options::default()).unwrap().is_empty());
    }

    #[test]
    fn subset_cap_is_enforced() {
        let t = parse_theory(YALE).unwrap();
        let opts = Options { subset_cap: 1, ..Options::default() };
        assert!(matches!(implicit_static_laws(&t, "tease", &opts), Err(AnalysisError::TooManySubsets { .. })));
    }

    #[test]
    fn ill_formed_theories_are_refused() {
        let t = parse_theory("theory x { fluents p; actions a; action a { executable p & ~p; } }").unwrap();
        assert!(matches!(implicit_static_laws(&t, "a", &Options::default()), Err(AnalysisError::IllFormed(1))));
    }

    #[test]
    fn yale_verdicts() {
        let t = parse_theory(YALE).unwrap();
        let o = Options::default();
        let tease = Scope::Action("tease".into());
        let ps = check_postulate(&t, Postulate::PS, &tease, &o).unwrap();
        assert_eq!(ps.status, Status::Violated);
        assert_eq!(ps.method, Method::Both);
        let pi = check_postulate(&t, Postulate::PI, &tease, &o).unwrap();
        assert_eq!(pi.status, Status::BlockedBy(Postulate::PS));
        assert!(check_postulate(&t, Postulate::PC, &tease, &o).unwrap().satisfied());
        assert!(!check_postulate(&t, Postulate::PSStar, &Scope::Theory, &o).unwrap().satisfied());
        assert!(matches!(check_postulate(&t, Postulate::PSStar, &tease, &o), Err(AnalysisError::InvalidScope { .. })));
    }

    #[test]
    fn empty_inexec_search() {
        let t = parse_theory("theory x { fluents p q; actions a; static { p -> q; } }").unwrap();
        assert!(implicit_inexec_laws(&t, "a", &Options::default()).unwrap().is_empty());
    }

    #[test]
    fn postulate_names_round_trip() {
        for p in Postulate::ALL {
            assert_eq!(Postulate::parse(p.name()), Some(p));
        }
        assert_eq!(Postulate::parse("ps*"), Some(Postulate::PSStar));
        assert_eq!(Postulate::parse("bogus"), None);
    }
}
