//! Diagnoses, repair suggestions and report rendering.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{
    check_postulate, effect_overlaps, implicit_inexec_laws, implicit_static_laws, reduced_inexec_laws,
    reduced_static_laws, AnalysisError, ImplicitInexecFinding, ImplicitStaticFinding, Options, Postulate,
    PostulateVerdict, Scope, Status,
};
use crate::classical::satisfiable;
use crate::kripke::{entails_dep, enumerate_countermodel, ENUM_MAX_FLUENTS};
use crate::syntax::{Formula, Literal, Query};
use crate::theory::{ActionTheory, Law, LawRef, Precondition, StaticLaw};

pub const SCHEMA: &str = "atmod/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RepairKind {
    AddStatic,
    WeakenExecutability,
    WeakenInexecutability,
    WeakenEffect,
    AddInexecutability,
    AddDependence,
}

/// A change to a theory. `None` antecedents remove the law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Edit {
    AddStatic(Formula),
    ReplaceExecutability { action: String, index: usize, antecedent: Option<Formula> },
    ReplaceInexecutability { action: String, index: usize, antecedent: Option<Formula> },
    ReplaceEffect { action: String, index: usize, antecedent: Option<Formula> },
    AddInexecutability { action: String, antecedent: Formula },
    AddDependence { action: String, literal: Literal },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairSuggestion {
    pub kind: RepairKind,
    pub edit: Edit,
    /// The law or dependence pair touched, as text.
    pub target: String,
    /// The proposed law as text, or `(remove)`.
    pub replacement: String,
    pub rationale: String,
}

impl RepairSuggestion {
    /// A copy of `t` with the suggestion applied.
    pub fn apply(&self, t: &ActionTheory) -> Result<ActionTheory, AnalysisError> {
        let mut t = t.clone();
        match &self.edit {
            Edit::AddStatic(f) => t.statics.push(StaticLaw::new(f.clone())),
            Edit::ReplaceExecutability { action, index, antecedent } => {
                let xs = &mut t.laws_mut(action)?.executabilities;
                match antecedent {
                    Some(f) => xs[*index] = Precondition::new(f.clone()),
                    None => {
                        xs.remove(*index);
                    }
                }
            }
            Edit::ReplaceInexecutability { action, index, antecedent } => {
                let xs = &mut t.laws_mut(action)?.inexecutabilities;
                match antecedent {
                    Some(f) => xs[*index] = Precondition::new(f.clone()),
                    None => {
                        xs.remove(*index);
                    }
                }
            }
            Edit::ReplaceEffect { action, index, antecedent } => {
                let es = &mut t.laws_mut(action)?.effects;
                match antecedent {
                    Some(f) => es[*index].antecedent = f.clone(),
                    None => {
                        es.remove(*index);
                    }
                }
            }
            Edit::AddInexecutability { action, antecedent } => {
                t.laws_mut(action)?.inexecutabilities.push(Precondition::new(antecedent.clone()))
            }
            Edit::AddDependence { action, literal } => {
                t.dependence.insert(action, literal.clone());
            }
        }
        Ok(t)
    }
}

/// `α ∧ ¬core`, or `None` if that is inconsistent with the static laws.
fn weaken(t: &ActionTheory, alpha: &Formula, core: Formula) -> Option<Formula> {
    let w = Formula::and(alpha.clone(), Formula::not(core)).simplify();
    let mut fs = t.static_formulas();
    fs.push(w.clone());
    satisfiable(&fs).then_some(w)
}

fn shown(f: &Option<Formula>, law: impl Fn(Formula) -> Law) -> String {
    match f {
        Some(f) => law(f.clone()).to_string(),
        None => "(remove)".to_string(),
    }
}

fn dependence_suggestions(a: &str, chi: &crate::syntax::Clause, out: &mut Vec<RepairSuggestion>) {
    for l in chi.literals() {
        out.push(RepairSuggestion {
            kind: RepairKind::AddDependence,
            edit: Edit::AddDependence { action: a.to_string(), literal: l.clone() },
            target: format!("{a} ~> {l}"),
            replacement: format!("causes {l}"),
            rationale: format!("let `{a}` bring about {l}, dropping the frame axiom behind the clash"),
        });
    }
}

/// Repairs for an implicit static law, in the order add, weaken, depend.
pub fn suggest_static_repairs(
    t: &ActionTheory,
    x: &ImplicitStaticFinding,
) -> Result<Vec<RepairSuggestion>, AnalysisError> {
    let a = x.action.as_str();
    let laws = t.laws(a)?;
    let consq = t.consq(a)?;
    let neg_chi = Formula::not(x.clause.to_formula());
    let ante = |skip: Option<&LawRef>| {
        Formula::conjunction(
            consq
                .iter()
                .filter(|c| x.subset.contains(&c.source) && Some(&c.source) != skip)
                .map(|c| c.antecedent.clone()),
        )
    };
    let mut out = Vec::new();
    // a contradictory law means no state is admitted at all; only weakening helps
    if satisfiable(std::slice::from_ref(&x.formula)) {
        out.push(RepairSuggestion {
            kind: RepairKind::AddStatic,
            edit: Edit::AddStatic(x.formula.clone()),
            target: "static laws".to_string(),
            replacement: x.formula.to_string(),
            rationale: "every state the theory admits satisfies this; state it as a static law".to_string(),
        });
    }

    let exec = Law::Executability { action: a.to_string(), antecedent: x.exec.clone() };
    let w = weaken(t, &x.exec, Formula::conjunction([ante(None), neg_chi.clone()]));
    out.push(RepairSuggestion {
        kind: RepairKind::WeakenExecutability,
        target: exec.to_string(),
        replacement: shown(&w, |f| Law::Executability { action: a.to_string(), antecedent: f }),
        edit: Edit::ReplaceExecutability { action: a.to_string(), index: x.exec_index, antecedent: w },
        rationale: "the executability is too strong; exempt the context where the action laws rule out every outcome"
            .to_string(),
    });

    for r in &x.subset {
        let core = Formula::conjunction([x.exec.clone(), ante(Some(r)), neg_chi.clone()]);
        match *r {
            LawRef::Effect(i) => {
                let e = &laws.effects[i];
                let w = weaken(t, &e.antecedent, core);
                out.push(RepairSuggestion {
                    kind: RepairKind::WeakenEffect,
                    target: Law::Effect {
                        action: a.to_string(),
                        antecedent: e.antecedent.clone(),
                        consequent: e.consequent.clone(),
                    }
                    .to_string(),
                    replacement: shown(&w, |f| Law::Effect {
                        action: a.to_string(),
                        antecedent: f,
                        consequent: e.consequent.clone(),
                    }),
                    edit: Edit::ReplaceEffect { action: a.to_string(), index: i, antecedent: w },
                    rationale: "the effect is too strong; exempt the context where it conflicts with the executability"
                        .to_string(),
                });
            }
            LawRef::Inexecutability(i) => {
                let alpha = &laws.inexecutabilities[i].antecedent;
                let w = weaken(t, alpha, core);
                out.push(RepairSuggestion {
                    kind: RepairKind::WeakenInexecutability,
                    target: Law::Inexecutability { action: a.to_string(), antecedent: alpha.clone() }.to_string(),
                    replacement: shown(&w, |f| Law::Inexecutability { action: a.to_string(), antecedent: f }),
                    edit: Edit::ReplaceInexecutability { action: a.to_string(), index: i, antecedent: w },
                    rationale:
                        "the inexecutability is too strong; exempt the context where the action is declared executable"
                            .to_string(),
                });
            }
        }
    }
    dependence_suggestions(a, &x.clause, &mut out);
    Ok(out)
}

/// Repairs for an implicit inexecutability law: state it, add a dependence, or weaken effects.
pub fn suggest_inexec_repairs(
    t: &ActionTheory,
    x: &ImplicitInexecFinding,
) -> Result<Vec<RepairSuggestion>, AnalysisError> {
    let a = x.action.as_str();
    let laws = t.laws(a)?;
    let mut out = vec![RepairSuggestion {
        kind: RepairKind::AddInexecutability,
        edit: Edit::AddInexecutability { action: a.to_string(), antecedent: x.antecedent.clone() },
        target: format!("inexecutability laws of {a}"),
        replacement: x.query().to_string(),
        rationale: "the action is impossible here anyway; state the qualification explicitly".to_string(),
    }];
    dependence_suggestions(a, &x.clause, &mut out);
    for &i in &x.subset {
        let e = &laws.effects[i];
        let w = weaken(t, &e.antecedent, x.raw.clone());
        out.push(RepairSuggestion {
            kind: RepairKind::WeakenEffect,
            target: Law::Effect {
                action: a.to_string(),
                antecedent: e.antecedent.clone(),
                consequent: e.consequent.clone(),
            }
            .to_string(),
            replacement: shown(&w, |f| Law::Effect {
                action: a.to_string(),
                antecedent: f,
                consequent: e.consequent.clone(),
            }),
            edit: Edit::ReplaceEffect { action: a.to_string(), index: i, antecedent: w },
            rationale: "the effect cannot be achieved in this context; restrict it to where it can".to_string(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictRow {
    pub postulate: String,
    pub scope: String,
    pub satisfied: bool,
    pub method: &'static str,
    #[serde(rename = "blockedBy", skip_serializing_if = "Option::is_none")]
    pub blocked_by: Option<String>,
    pub witnesses: Vec<String>,
    pub notes: Vec<String>,
}

impl From<&PostulateVerdict> for VerdictRow {
    fn from(v: &PostulateVerdict) -> VerdictRow {
        VerdictRow {
            postulate: v.postulate.name().to_string(),
            scope: v.scope.to_string(),
            satisfied: v.satisfied(),
            method: v.method.name(),
            blocked_by: match v.status {
                Status::BlockedBy(p) => Some(p.name().to_string()),
                _ => None,
            },
            witnesses: {
                // one line per distinct law; the findings carry the per-subset detail
                let mut seen = std::collections::BTreeSet::new();
                v.witnesses.iter().map(|w| w.to_string()).filter(|w| seen.insert(w.clone())).collect()
            },
            notes: v.notes.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exec: Option<String>,
    pub subset: Vec<String>,
    pub clause: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub round: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuggestionRow {
    pub kind: RepairKind,
    pub target: String,
    pub replacement: String,
    pub rationale: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FindingRow {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    pub raw: String,
    /// Implied by the other findings and the stated laws.
    pub redundant: bool,
    pub witness: WitnessRow,
    pub suggestions: Vec<SuggestionRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapRow {
    pub action: String,
    pub context: String,
    pub law: String,
    pub inexecutable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    /// `pass`, `fail` or `skipped`.
    pub crosscheck: &'static str,
    pub bound: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnosis {
    pub schema: &'static str,
    pub tool: Tool,
    pub theory: String,
    pub verdicts: Vec<VerdictRow>,
    pub findings: Vec<FindingRow>,
    pub overlaps: Vec<OverlapRow>,
    pub oracle: OracleRow,
    #[serde(skip)]
    pub suggestions: Vec<RepairSuggestion>,
}

impl Diagnosis {
    pub fn empty(theory: &str) -> Diagnosis {
        Diagnosis {
            schema: SCHEMA,
            tool: Tool { name: "atmod", version: env!("CARGO_PKG_VERSION") },
            theory: theory.to_string(),
            verdicts: Vec::new(),
            findings: Vec::new(),
            overlaps: Vec::new(),
            oracle: OracleRow { crosscheck: "skipped", bound: 0, failures: Vec::new() },
            suggestions: Vec::new(),
        }
    }

    pub fn all_satisfied(&self) -> bool {
        self.verdicts.iter().all(|v| v.satisfied)
    }
}

#[derive(Clone, Debug)]
pub struct DiagnoseOptions {
    pub analysis: Options,
    pub postulates: Vec<Postulate>,
    /// Countermodel bound for confirming findings; 0 skips the check.
    pub bound: usize,
}

impl Default for DiagnoseOptions {
    fn default() -> DiagnoseOptions {
        DiagnoseOptions { analysis: Options::default(), postulates: Postulate::DEFAULT.to_vec(), bound: 2 }
    }
}

fn suggestion_rows(s: &[RepairSuggestion]) -> Vec<SuggestionRow> {
    s.iter()
        .map(|s| SuggestionRow {
            kind: s.kind,
            target: s.target.clone(),
            replacement: s.replacement.clone(),
            rationale: s.rationale.clone(),
        })
        .collect()
}

/// Run the postulate suite and both searches over every action.
pub fn diagnose(t: &ActionTheory, opts: &DiagnoseOptions) -> Result<Diagnosis, AnalysisError> {
    let mut d = Diagnosis::empty(&t.name);
    for &p in &opts.postulates {
        if p.is_theory_wide() {
            d.verdicts.push((&check_postulate(t, p, &Scope::Theory, &opts.analysis)?).into());
        } else {
            for a in &t.domain.actions {
                d.verdicts.push((&check_postulate(t, p, &Scope::Action(a.clone()), &opts.analysis)?).into());
            }
        }
    }

    let mut confirm: Vec<Query> = Vec::new();
    for a in &t.domain.actions {
        let statics = implicit_static_laws(t, a, &opts.analysis)?;
        let kept = reduced_static_laws(t, &statics);
        let mut seen = Vec::new();
        for x in &statics {
            let sugg = suggest_static_repairs(t, x)?;
            let redundant = !kept.contains(&x.formula) || seen.contains(&x.formula);
            seen.push(x.formula.clone());
            confirm.push(Query::Classical(x.formula.clone()));
            d.findings.push(FindingRow {
                kind: "implicit-static",
                action: a.clone(),
                formula: Some(x.formula.to_string()),
                law: None,
                raw: x.raw.to_string(),
                redundant,
                witness: WitnessRow {
                    exec: Some(Law::Executability { action: a.clone(), antecedent: x.exec.clone() }.to_string()),
                    subset: x.subset.iter().map(|r| law_text(t, a, r)).collect(),
                    clause: x.clause.to_string(),
                    round: Some(x.round),
                },
                suggestions: suggestion_rows(&sugg),
                notes: Vec::new(),
            });
            d.suggestions.extend(sugg);
        }
        let ps_holds = statics.is_empty();
        let inexecs = implicit_inexec_laws(t, a, &opts.analysis)?;
        let kept = reduced_inexec_laws(t, &inexecs)?;
        let mut seen = Vec::new();
        for x in &inexecs {
            let sugg = suggest_inexec_repairs(t, x)?;
            let redundant = !kept.contains(&x.antecedent) || seen.contains(&x.antecedent);
            seen.push(x.antecedent.clone());
            confirm.push(x.query());
            let laws = t.laws(a)?;
            d.findings.push(FindingRow {
                kind: "implicit-inexecutability",
                action: a.clone(),
                formula: None,
                law: Some(x.query().to_string()),
                raw: x.raw.to_string(),
                redundant,
                witness: WitnessRow {
                    exec: None,
                    subset: x
                        .subset
                        .iter()
                        .map(|&i| {
                            let e = &laws.effects[i];
                            Law::Effect {
                                action: a.clone(),
                                antecedent: e.antecedent.clone(),
                                consequent: e.consequent.clone(),
                            }
                            .to_string()
                        })
                        .collect(),
                    clause: x.clause.to_string(),
                    round: None,
                },
                suggestions: suggestion_rows(&sugg),
                notes: if ps_holds {
                    Vec::new()
                } else {
                    vec![format!("`{a}` has implicit static laws, so this search may be incomplete")]
                },
            });
            d.suggestions.extend(sugg);
        }
    }

    for o in effect_overlaps(t)? {
        d.overlaps.push(OverlapRow {
            action: o.action.clone(),
            context: o.context.to_string(),
            law: o.effect.to_string(),
            inexecutable: o.inexecutable,
        });
    }

    d.oracle = oracle_confirm(t, &confirm, opts.bound)?;
    Ok(d)
}

fn law_text(t: &ActionTheory, a: &str, r: &LawRef) -> String {
    let laws = match t.laws(a) {
        Ok(l) => l,
        Err(_) => return String::new(),
    };
    match *r {
        LawRef::Effect(i) => {
            let e = &laws.effects[i];
            Law::Effect { action: a.to_string(), antecedent: e.antecedent.clone(), consequent: e.consequent.clone() }
                .to_string()
        }
        LawRef::Inexecutability(i) => {
            Law::Inexecutability { action: a.to_string(), antecedent: laws.inexecutabilities[i].antecedent.clone() }
                .to_string()
        }
    }
}

/// Check each query against the frame and, within the bound, against countermodel search.
pub fn oracle_confirm(t: &ActionTheory, queries: &[Query], bound: usize) -> Result<OracleRow, AnalysisError> {
    if bound == 0 || t.domain.fluents.len() > ENUM_MAX_FLUENTS {
        return Ok(OracleRow { crosscheck: "skipped", bound, failures: Vec::new() });
    }
    let mut failures = Vec::new();
    for q in queries {
        let dep = entails_dep(t, q)?;
        let refuted = enumerate_countermodel(t, q, bound)?.is_some();
        if !dep {
            failures.push(format!("{q}: not entailed by the pruned frame"));
        }
        if refuted {
            failures.push(format!("{q}: countermodel within {bound} worlds"));
        }
    }
    Ok(OracleRow { crosscheck: if failures.is_empty() { "pass" } else { "fail" }, bound, failures })
}

pub fn render_json(d: &Diagnosis) -> String {
    let mut s = serde_json::to_string_pretty(d).expect("diagnosis serializes");
    s.push('\n');
    s
}

pub fn render_text(d: &Diagnosis) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "theory {}  ({} {})", d.theory, d.tool.name, d.tool.version);
    let _ = writeln!(s, "\nverdicts:");
    for v in &d.verdicts {
        let status = match (&v.blocked_by, v.satisfied) {
            (Some(p), _) => format!("blocked by {p}"),
            (None, true) => "ok".to_string(),
            (None, false) => "VIOLATED".to_string(),
        };
        let _ = writeln!(s, "  {:<5} {:<10} {:<14} [{}]", v.postulate, v.scope, status, v.method);
        for w in &v.witnesses {
            let _ = writeln!(s, "        witness: {w}");
        }
        for n in &v.notes {
            let _ = writeln!(s, "        note: {n}");
        }
    }
    let _ = writeln!(s, "\nfindings:");
    if d.findings.is_empty() {
        let _ = writeln!(s, "  none");
    }
    for (i, f) in d.findings.iter().enumerate() {
        let what = f.formula.as_ref().or(f.law.as_ref()).cloned().unwrap_or_default();
        let red = if f.redundant { "  (redundant)" } else { "" };
        let _ = writeln!(s, "  {}. {} [{}]: {}{}", i + 1, f.kind, f.action, what, red);
        if let Some(x) = &f.witness.exec {
            let _ = writeln!(s, "     executability: {x}");
        }
        if !f.witness.subset.is_empty() {
            let _ = writeln!(s, "     combined: {}", f.witness.subset.join("; "));
        }
        let round = f.witness.round.map(|r| format!(", round {r}")).unwrap_or_default();
        let _ = writeln!(s, "     clause: {}{}", f.witness.clause, round);
        for n in &f.notes {
            let _ = writeln!(s, "     note: {n}");
        }
        for (j, g) in f.suggestions.iter().enumerate() {
            let _ = writeln!(s, "     option {}: {:?} {} => {}", j + 1, g.kind, g.target, g.replacement);
            let _ = writeln!(s, "               {}", g.rationale);
        }
    }
    if !d.overlaps.is_empty() {
        let _ = writeln!(s, "\neffect/inexecutability overlaps (informational):");
        for o in &d.overlaps {
            let status = if o.inexecutable { "impossible there" } else { "possible there" };
            let _ = writeln!(s, "  {}: {} ({status})", o.action, o.law);
        }
    }
    let _ = writeln!(s, "\noracle: {} (bound {})", d.oracle.crosscheck, d.oracle.bound);
    for f in &d.oracle.failures {
        let _ = writeln!(s, "  {f}");
    }
    s
}


/// Which per-action search `analyze` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Search {
    Static,
    Inexec,
}

impl Search {
    pub fn name(self) -> &'static str {
        match self {
            Search::Static => "static",
            Search::Inexec => "inexec",
        }
    }

    pub fn parse(s: &str) -> Option<Search> {
        match s {
            "static" => Some(Search::Static),
            "inexec" => Some(Search::Inexec),
            _ => None,
        }
    }
}

/// Findings of one search as JSON rows, with every repair suggested for them.
pub struct Analysis {
    pub rows: Vec<serde_json::Value>,
    pub suggestions: Vec<RepairSuggestion>,
}

fn suggestion_lines(s: &[RepairSuggestion]) -> Vec<String> {
    s.iter().map(|s| format!("{:?}: {} => {}", s.kind, s.target, s.replacement)).collect()
}

pub fn analyze(t: &ActionTheory, action: &str, search: Search, opts: &Options) -> Result<Analysis, AnalysisError> {
    let mut rows = Vec::new();
    let mut suggestions = Vec::new();
    match search {
        Search::Static => {
            for x in &implicit_static_laws(t, action, opts)? {
                let s = suggest_static_repairs(t, x)?;
                rows.push(serde_json::json!({
                    "formula": x.formula.to_string(),
                    "raw": x.raw.to_string(),
                    "exec": x.exec.to_string(),
                    "mask": x.mask,
                    "clause": x.clause.to_string(),
                    "round": x.round,
                    "suggestions": suggestion_lines(&s),
                }));
                suggestions.extend(s);
            }
        }
        Search::Inexec => {
            let mut notes = Vec::new();
            if !implicit_static_laws(t, action, opts)?.is_empty() {
                notes.push("implicit static laws present; the result may be incomplete");
            }
            for x in &implicit_inexec_laws(t, action, opts)? {
                let s = suggest_inexec_repairs(t, x)?;
                rows.push(serde_json::json!({
                    "law": x.query().to_string(),
                    "raw": x.raw.to_string(),
                    "mask": x.mask,
                    "clause": x.clause.to_string(),
                    "notes": notes,
                    "suggestions": suggestion_lines(&s),
                }));
                suggestions.extend(s);
            }
        }
    }
    Ok(Analysis { rows, suggestions })
}

pub fn analysis_json(t: &ActionTheory, action: &str, search: Search, rows: &[serde_json::Value]) -> String {
    let v = serde_json::json!({
        "schema": SCHEMA, "theory": t.name, "action": action, "algorithm": search.name(), "findings": rows,
    });
    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
}
