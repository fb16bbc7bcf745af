//! The `atmod` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{check_postulate, AnalysisError, NewConsBase, Options, Postulate, Scope};
use crate::classical::{EngineError, Universe};
use crate::kripke::{
    big_model, entails_dep, entails_pdl, enumerate_countermodel, prune_fixpoint, KripkeError, KripkeModel,
    ENUM_DEFAULT_WORLDS, ENUM_MAX_FLUENTS,
};
use crate::parse::parse_query;
use crate::report::{
    analysis_json, analyze, diagnose, render_json, render_text, Analysis, DiagnoseOptions, Diagnosis, RepairSuggestion,
    Search,
};
use crate::syntax::{Formula, Literal, Query};
use crate::theory::{parse_theory, validate, ActionTheory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "atmod", version, about = "Modularity analysis for propositional action theories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Base {
    Literal,
    Grow,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algorithm {
    Static,
    Inexec,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Classical,
    Box,
    Diamond,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Theory file in `.at` syntax.
    file: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Base set of the new-consequence step in the static-law search.
    #[arg(long = "newcons-base", value_enum, default_value = "literal")]
    newcons_base: Base,
    /// Largest number of combined laws per action.
    #[arg(long = "subset-cap", default_value_t = crate::analysis::DEFAULT_SUBSET_CAP)]
    subset_cap: usize,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            newcons_base: match self.newcons_base {
                Base::Literal => NewConsBase::Literal,
                Base::Grow => NewConsBase::Grow,
            },
            subset_cap: self.subset_cap,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide the postulate suite and list findings with repairs.
    Check {
        #[command(flatten)]
        common: Common,
        /// Comma-separated postulates, e.g. `PS,PI,PX+`; default is the core suite.
        #[arg(long)]
        postulates: Option<String>,
        /// Countermodel bound for confirming findings (0 skips).
        #[arg(long, default_value_t = 2)]
        bound: usize,
        /// Write one patched theory per suggestion into this directory.
        #[arg(long = "emit-patched")]
        emit_patched: Option<PathBuf>,
    },
    /// Run one search for one action and show raw findings.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        action: String,
        #[arg(long, value_enum, default_value = "static")]
        algorithm: Algorithm,
        #[arg(long = "emit-patched")]
        emit_patched: Option<PathBuf>,
    },
    /// Decide whether the theory entails a law-shaped formula.
    Query {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        expr: String,
        /// Plain modal consequence, ignoring the dependence relation.
        #[arg(long)]
        pdl: bool,
    },
    /// Print the big model or the pruned frame.
    Model {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "pruned")]
        big: bool,
        #[arg(long)]
        pruned: bool,
        /// Also write the model in GraphViz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Compare the frame decision, countermodel search and the searches.
    Crosscheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = ENUM_DEFAULT_WORLDS)]
        bound: usize,
    },
}

enum Failure {
    Input(String),
    Resource(String),
    Internal(String),
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Failure {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else if matches!(e, AnalysisError::Disagreement { .. }) {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<KripkeError> for Failure {
    fn from(e: KripkeError) -> Failure {
        AnalysisError::from(e).into()
    }
}

fn load(path: &Path) -> Result<ActionTheory, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let t = parse_theory(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let bad = validate(&t);
    if !bad.is_empty() {
        let lines: Vec<String> = bad.iter().map(|v| format!("{}: {v}", path.display())).collect();
        return Err(Failure::Input(lines.join("\n")));
    }
    Ok(t)
}

fn parse_postulates(s: &str) -> Result<Vec<Postulate>, Failure> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| Postulate::parse(p).ok_or_else(|| Failure::Input(format!("unknown postulate `{}`", p.trim()))))
        .collect()
}

fn emit_patched(dir: &Path, t: &ActionTheory, suggestions: &[RepairSuggestion]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    for (i, s) in suggestions.iter().enumerate() {
        let patched = s.apply(t)?;
        let path = dir.join(format!("{}.{:02}.{:?}.at", t.name, i + 1, s.kind));
        let body = format!("# repair {:?}: {} => {}\n{}", s.kind, s.target, s.replacement, patched.print());
        std::fs::write(&path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn write_out(out: &mut dyn Write, s: &str) {
    let _ = out.write_all(s.as_bytes());
}

fn run_command(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Check { common, postulates, bound, emit_patched: dir } => {
            let t = load(&common.file)?;
            let opts = DiagnoseOptions {
                analysis: common.options(),
                postulates: match postulates {
                    Some(p) => parse_postulates(&p)?,
                    None => Postulate::DEFAULT.to_vec(),
                },
                bound,
            };
            let d = diagnose(&t, &opts)?;
            if let Some(dir) = dir {
                emit_patched(&dir, &t, &d.suggestions)?;
            }
            write_diagnosis(out, &d, common.format);
            if d.oracle.crosscheck == "fail" {
                return Err(Failure::Internal(d.oracle.failures.join("; ")));
            }
            Ok(if d.all_satisfied() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Analyze { common, action, algorithm, emit_patched: dir } => {
            let t = load(&common.file)?;
            t.action_index(&action).map_err(|e| Failure::Input(e.to_string()))?;
            let search = match algorithm {
                Algorithm::Static => Search::Static,
                Algorithm::Inexec => Search::Inexec,
            };
            let Analysis { rows, suggestions } = analyze(&t, &action, search, &common.options())?;
            if let Some(dir) = dir {
                emit_patched(&dir, &t, &suggestions)?;
            }
            let alg = search.name();
            match common.format {
                Format::Json => {
                    write_out(out, &analysis_json(&t, &action, search, &rows));
                }
                Format::Text => {
                    let mut s = format!("{alg} search for `{action}` in {}: {} findings\n", t.name, rows.len());
                    for r in &rows {
                        let what = r.get("formula").or_else(|| r.get("law")).and_then(|v| v.as_str()).unwrap_or("");
                        s.push_str(&format!("  {what}   (clause {})\n", r["clause"].as_str().unwrap_or("")));
                    }
                    write_out(out, &s);
                }
            }
            Ok(if rows.is_empty() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Query { common, kind, expr, pdl } => {
            let t = load(&common.file)?;
            let q = parse_query(&expr).map_err(|e| Failure::Input(format!("--expr: {e}")))?;
            let got = match q {
                Query::Classical(_) => Kind::Classical,
                Query::Box { .. } => Kind::Box,
                Query::Diamond { .. } => Kind::Diamond,
            };
            if std::mem::discriminant(&got) != std::mem::discriminant(&kind) {
                return Err(Failure::Input(format!("--expr is a {got:?} query, not {kind:?}").to_lowercase()));
            }
            t.check_query(&q).map_err(|e| Failure::Input(e.to_string()))?;
            let target = if pdl { t.with_total_dependence() } else { t.clone() };
            let entailed = if pdl { entails_pdl(&t, &q)? } else { entails_dep(&t, &q)? };
            let countermodel = if !entailed && t.domain.fluents.len() <= ENUM_MAX_FLUENTS {
                enumerate_countermodel(&target, &q, ENUM_DEFAULT_WORLDS)?
            } else {
                None
            };
            match common.format {
                Format::Json => {
                    let v = json!({
                        "schema": crate::report::SCHEMA,
                        "theory": t.name,
                        "query": q.to_string(),
                        "consequence": if pdl { "pdl" } else { "dependence" },
                        "entailed": entailed,
                        "countermodel": countermodel.as_ref().map(KripkeModel::to_json),
                    });
                    write_out(out, &format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
                }
                Format::Text => {
                    let mut s = format!("{q}\nentailed: {entailed}\n");
                    if let Some(m) = &countermodel {
                        s.push_str(&format!("countermodel with {} worlds:\n{}", m.worlds.len(), m.to_dot()));
                    }
                    write_out(out, &s);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Model { common, big: _, pruned, dot } => {
            let t = load(&common.file)?;
            let m = if pruned { prune_fixpoint(&t)?.to_model() } else { Some(big_model(&t)?) };
            let Some(m) = m else {
                write_out(out, "{\"worlds\": []}\n");
                return Ok(EXIT_VIOLATION);
            };
            if let Some(path) = dot {
                std::fs::write(&path, m.to_dot()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            }
            match common.format {
                Format::Json => {
                    write_out(out, &format!("{}\n", serde_json::to_string_pretty(&m.to_json()).expect("json")))
                }
                Format::Text => write_out(out, &m.to_dot()),
            }
            Ok(EXIT_OK)
        }
        Command::Crosscheck { common, bound } => {
            let t = load(&common.file)?;
            crosscheck(&t, &common.options(), bound, common.format, out)
        }
    }
}

fn write_diagnosis(out: &mut dyn Write, d: &Diagnosis, format: Format) {
    match format {
        Format::Json => write_out(out, &render_json(d)),
        Format::Text => write_out(out, &render_text(d)),
    }
}

/// Every term-antecedent query of each law shape for each action.
pub fn law_shaped_queries(t: &ActionTheory) -> Result<Vec<Query>, EngineError> {
    let u = Universe::new(t.domain.fluents.iter().cloned())?;
    let mut qs = Vec::new();
    for v in u.valuations() {
        let term = u.term(v);
        qs.push(Query::Classical(Formula::not(term.clone())));
        for a in &t.domain.actions {
            qs.push(Query::inexecutability(a, term.clone()));
            qs.push(Query::Diamond { action: a.clone(), antecedent: term.clone() });
            for p in &t.domain.fluents {
                for l in [Literal::pos(p.clone()), Literal::neg(p.clone())] {
                    qs.push(Query::Box { action: a.clone(), antecedent: term.clone(), consequent: l.to_formula() });
                }
            }
        }
    }
    Ok(qs)
}

fn crosscheck(
    t: &ActionTheory,
    opts: &Options,
    bound: usize,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if t.domain.fluents.len() > ENUM_MAX_FLUENTS {
        return Err(Failure::Resource(format!(
            "countermodel search supports at most {ENUM_MAX_FLUENTS} fluents, theory has {}",
            t.domain.fluents.len()
        )));
    }
    let mut problems = Vec::new();
    let mut checked = 0usize;
    for q in law_shaped_queries(t).map_err(|e| Failure::Resource(e.to_string()))? {
        checked += 1;
        let dep = entails_dep(t, &q)?;
        let refuted = enumerate_countermodel(t, &q, bound)?.is_some();
        if dep == refuted {
            problems.push(format!("{q}: frame says {dep}, countermodel search says {}", !refuted));
        }
        if entails_pdl(t, &q)? && !dep {
            problems.push(format!("{q}: plain modal consequence without dependence consequence"));
        }
    }
    let mut verdicts = 0usize;
    for p in Postulate::ALL {
        let scopes: Vec<Scope> = if p.is_theory_wide() {
            vec![Scope::Theory]
        } else {
            t.domain.actions.iter().map(|a| Scope::Action(a.clone())).collect()
        };
        for s in scopes {
            verdicts += 1;
            match check_postulate(t, p, &s, opts) {
                Ok(_) => {}
                Err(e @ AnalysisError::Disagreement { .. }) => problems.push(e.to_string()),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let status = if problems.is_empty() { "pass" } else { "fail" };
    match format {
        Format::Json => {
            let v = json!({
                "schema": crate::report::SCHEMA,
                "theory": t.name,
                "oracle": {"crosscheck": status, "bound": bound},
                "queries": checked,
                "verdicts": verdicts,
                "problems": problems,
            });
            write_out(out, &format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
        }
        Format::Text => {
            let mut s = format!("{}: {checked} queries, {verdicts} verdicts, bound {bound}: {status}\n", t.name);
            for p in &problems {
                s.push_str(&format!("  {p}\n"));
            }
            write_out(out, &s);
        }
    }
    Ok(if problems.is_empty() { EXIT_OK } else { EXIT_VIOLATION })
}

/// Run the command line; report to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match run_command(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Input(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_INPUT
        }
        Err(Failure::Resource(m)) => {
            let _ = writeln!(err, "resource limit: {m}");
            EXIT_RESOURCE
        }
        Err(Failure::Internal(m)) => {
            let _ = writeln!(err, "internal error: {m}");
            EXIT_VIOLATION
        }
    }
}
