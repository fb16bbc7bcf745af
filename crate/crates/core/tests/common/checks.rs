//! Property checks on one theory; each returns a description of the first failure.

use atmod::analysis::{
    check_postulate, implicit_inexec_laws, implicit_static_laws, NewConsBase, Options, Postulate, Scope,
};
use atmod::classical::Universe;
use atmod::cli::law_shaped_queries;
use atmod::kripke::{big_model, entails_dep, entails_pdl, enumerate_countermodel, is_dep_model, prune_fixpoint};
use atmod::theory::{LawSelection, Precondition};
use atmod::{entails, satisfiable, ActionTheory, Formula, Query};

pub type Check = Result<(), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const GROW: Options = Options { newcons_base: NewConsBase::Grow, subset_cap: 16 };
const LITERAL: Options = Options { newcons_base: NewConsBase::Literal, subset_cap: 16 };

fn terms(t: &ActionTheory) -> Vec<Formula> {
    let u = Universe::new(t.domain.fluents.iter().cloned()).unwrap();
    u.valuations().map(|v| u.term(v)).collect()
}

pub fn ps_holds(t: &ActionTheory, a: &str) -> Result<bool, String> {
    Ok(implicit_static_laws(t, a, &LITERAL).map_err(err)?.is_empty())
}

pub fn ps_star(t: &ActionTheory) -> Result<bool, String> {
    for a in &t.domain.actions {
        if !ps_holds(t, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn pi_star(t: &ActionTheory) -> Result<bool, String> {
    Ok(check_postulate(t, Postulate::PIStar, &Scope::Theory, &LITERAL).map_err(err)?.satisfied())
}

/// Static-law search empty, big model a model, and nothing pruned: all or none.
pub fn ps_three_way(t: &ActionTheory) -> Check {
    for a in &t.domain.actions {
        let ta = t.restrict_to(a).map_err(err)?;
        let lit = implicit_static_laws(t, a, &LITERAL).map_err(err)?.is_empty();
        let grow = implicit_static_laws(t, a, &GROW).map_err(err)?.is_empty();
        let big = is_dep_model(&big_model(&ta).map_err(err)?, &ta).map_err(err)?;
        let frame = prune_fixpoint(&ta).map_err(err)?;
        let full = frame.surviving().len() == frame.initial().len();
        if !(lit == grow && grow == big && big == full) {
            return Err(format!("{a}: search {lit}/{grow}, big model {big}, unpruned {full}"));
        }
        check_postulate(t, Postulate::PS, &Scope::Action(a.clone()), &LITERAL).map_err(err)?;
    }
    Ok(())
}

/// Found laws are consequences, and with them the static laws capture every classical consequence.
pub fn classical_consequences(t: &ActionTheory) -> Check {
    for a in &t.domain.actions {
        let ta = t.restrict_to(a).map_err(err)?;
        for opts in [LITERAL, GROW] {
            for x in implicit_static_laws(t, a, &opts).map_err(err)? {
                if !entails_dep(&ta, &Query::Classical(x.formula.clone())).map_err(err)? {
                    return Err(format!("{a}: finding {} is not a consequence", x.formula));
                }
            }
        }
        let mut base = t.static_formulas();
        base.extend(implicit_static_laws(t, a, &GROW).map_err(err)?.into_iter().map(|x| x.raw));
        for term in terms(t) {
            let f = Formula::not(term);
            let dep = entails_dep(&ta, &Query::Classical(f.clone())).map_err(err)?;
            if dep != entails(&base, &f) {
                return Err(format!("{a}: {f} is a consequence: {dep}, follows from laws found: {}", !dep));
            }
        }
    }
    Ok(())
}

pub fn ps_implies_px(t: &ActionTheory) -> Check {
    for a in &t.domain.actions {
        let s = Scope::Action(a.clone());
        if check_postulate(t, Postulate::PS, &s, &LITERAL).map_err(err)?.satisfied()
            && !check_postulate(t, Postulate::PX, &s, &LITERAL).map_err(err)?.satisfied()
        {
            return Err(format!("{a}: PS holds but PX fails"));
        }
    }
    Ok(())
}

/// Under PS*, the theory is inconsistent exactly when its static laws are.
pub fn consistency_reduction(t: &ActionTheory) -> Check {
    if !ps_star(t)? {
        return Ok(());
    }
    let empty = prune_fixpoint(t).map_err(err)?.is_empty();
    let unsat = !satisfiable(&t.static_formulas());
    if empty != unsat {
        return Err(format!("frame empty {empty}, static laws unsatisfiable {unsat}"));
    }
    Ok(())
}

/// Under PS*, consequences about one action follow from that action's relevant laws alone.
pub fn localization(t: &ActionTheory) -> Check {
    if !ps_star(t)? {
        return Ok(());
    }
    let pi = pi_star(t)?;
    let effects = LawSelection { executabilities: false, ..LawSelection::ALL };
    let execs = LawSelection { statics: true, executabilities: true, ..LawSelection::NONE };
    let inexecs = LawSelection { statics: true, inexecutabilities: true, ..LawSelection::NONE };
    for q in law_shaped_queries(t).map_err(err)? {
        let Some(a) = q.action() else { continue };
        let whole = entails_dep(t, &q).map_err(err)?;
        let sel = match &q {
            Query::Diamond { .. } => execs,
            Query::Box { consequent: Formula::False, .. } if pi => {
                let part = t.select(inexecs, Some(a)).map_err(err)?;
                if entails_dep(&part, &q).map_err(err)? != whole {
                    return Err(format!("{q}: inexecutability laws alone disagree"));
                }
                effects
            }
            _ => effects,
        };
        let part = t.select(sel, Some(a)).map_err(err)?;
        if entails_dep(&part, &q).map_err(err)? != whole {
            return Err(format!("{q}: whole theory {whole}, local laws {}", !whole));
        }
    }
    Ok(())
}

/// Adding the found inexecutabilities leaves nothing to find.
pub fn inexec_soundness(t: &ActionTheory) -> Check {
    for a in &t.domain.actions {
        if !ps_holds(t, a)? {
            continue;
        }
        let found = implicit_inexec_laws(t, a, &LITERAL).map_err(err)?;
        let mut fixed = t.clone();
        for x in found {
            fixed.laws_mut(a).map_err(err)?.inexecutabilities.push(Precondition::new(x.antecedent));
        }
        let again = implicit_inexec_laws(&fixed, a, &LITERAL).map_err(err)?;
        if !again.is_empty() {
            return Err(format!("{a}: {} findings remain", again.len()));
        }
    }
    Ok(())
}

/// More dependence never removes candidate edges; fewer executabilities never remove states.
pub fn monotonicity(t: &ActionTheory) -> Check {
    let frame = prune_fixpoint(t).map_err(err)?;
    for a in &t.domain.actions {
        for l in t.domain.literals() {
            if t.dependence.depends(a, &l) {
                continue;
            }
            let mut more = t.clone();
            more.dependence.insert(a, l.clone());
            let bigger = prune_fixpoint(&more).map_err(err)?;
            let before = frame.maxrel(a);
            let after = bigger.maxrel(a);
            if before.iter().any(|e| !after.contains(e)) {
                return Err(format!("adding {a} ~> {l} removed an edge"));
            }
            if frame.surviving().iter().any(|v| !bigger.contains(*v)) {
                return Err(format!("adding {a} ~> {l} removed a state"));
            }
        }
        let n = t.laws(a).map_err(err)?.executabilities.len();
        for i in 0..n {
            let mut fewer = t.clone();
            fewer.laws_mut(a).map_err(err)?.executabilities.remove(i);
            let f2 = prune_fixpoint(&fewer).map_err(err)?;
            if frame.surviving().iter().any(|v| !f2.contains(*v)) {
                return Err(format!("removing an executability of {a} removed a state"));
            }
        }
    }
    Ok(())
}

/// Plain modal consequence implies dependence consequence.
pub fn pdl_weaker(t: &ActionTheory) -> Check {
    for q in law_shaped_queries(t).map_err(err)? {
        if entails_pdl(t, &q).map_err(err)? && !entails_dep(t, &q).map_err(err)? {
            return Err(format!("{q}"));
        }
    }
    Ok(())
}

/// The frame decision agrees with bounded countermodel search, for both consequence relations.
pub fn oracle_agrees(t: &ActionTheory, queries: &[Query], bound: usize) -> Check {
    let total = t.with_total_dependence();
    for q in queries {
        let dep = entails_dep(t, q).map_err(err)?;
        let none = enumerate_countermodel(t, q, bound).map_err(err)?.is_none();
        if dep != none {
            return Err(format!("{q}: frame {dep}, countermodel search {none}\n{}", t.print()));
        }
        let pdl = entails_pdl(t, q).map_err(err)?;
        let none = enumerate_countermodel(&total, q, bound).map_err(err)?.is_none();
        if pdl != none {
            return Err(format!("{q} (plain): frame {pdl}, countermodel search {none}\n{}", t.print()));
        }
    }
    Ok(())
}

type Named = (&'static str, fn(&ActionTheory) -> Check);

pub fn all_theorems(t: &ActionTheory) -> Check {
    let checks: [Named; 8] = [
        ("PS three-way", ps_three_way),
        ("classical consequences", classical_consequences),
        ("PS implies PX", ps_implies_px),
        ("consistency reduction", consistency_reduction),
        ("localization", localization),
        ("inexecutability soundness", inexec_soundness),
        ("monotonicity", monotonicity),
        ("plain consequence weaker", pdl_weaker),
    ];
    for (name, c) in checks {
        c(t).map_err(|e| format!("{name}: {e}\n{}", t.print()))?;
    }
    Ok(())
}

use atmod::report::{suggest_inexec_repairs, suggest_static_repairs, Edit, RepairSuggestion};
use atmod::theory::LawRef;

/// Where a law index moves to once `edit` is applied; `None` if the law is gone.
fn remap(edit: &Edit, action: &str, r: LawRef) -> Option<LawRef> {
    match (edit, r) {
        (Edit::ReplaceEffect { action: x, index, antecedent: None }, LawRef::Effect(i)) if x == action => {
            if i == *index {
                None
            } else {
                Some(LawRef::Effect(if i > *index { i - 1 } else { i }))
            }
        }
        (Edit::ReplaceInexecutability { action: x, index, antecedent: None }, LawRef::Inexecutability(i))
            if x == action =>
        {
            if i == *index {
                None
            } else {
                Some(LawRef::Inexecutability(if i > *index { i - 1 } else { i }))
            }
        }
        _ => Some(r),
    }
}

fn exec_gone(edit: &Edit, action: &str, exec: usize) -> bool {
    matches!(edit, Edit::ReplaceExecutability { action: x, index, antecedent: None } if x == action && *index == exec)
}

/// Each suggestion, applied on its own, makes the originating search lose the witnessed finding.
pub fn repair_efficacy(t: &ActionTheory, opts: &Options) -> Result<usize, String> {
    let mut applied = 0;
    for a in &t.domain.actions {
        for x in implicit_static_laws(t, a, opts).map_err(err)? {
            for s in suggest_static_repairs(t, &x).map_err(err)? {
                applied += 1;
                let fixed = s.apply(t).map_err(err)?;
                if exec_gone(&s.edit, a, x.exec_index) {
                    continue;
                }
                let subset: Option<Vec<LawRef>> = x.subset.iter().map(|r| remap(&s.edit, a, *r)).collect();
                let Some(subset) = subset else { continue };
                let again = implicit_static_laws(&fixed, a, opts).map_err(err)?;
                if again.iter().any(|y| y.exec_index == x.exec_index && y.subset == subset && y.clause == x.clause) {
                    return Err(describe(&s, &x.formula.to_string(), t));
                }
            }
        }
        for x in implicit_inexec_laws(t, a, opts).map_err(err)? {
            for s in suggest_inexec_repairs(t, &x).map_err(err)? {
                applied += 1;
                let fixed = s.apply(t).map_err(err)?;
                let subset: Option<Vec<LawRef>> =
                    x.subset.iter().map(|&i| remap(&s.edit, a, LawRef::Effect(i))).collect();
                let Some(subset) = subset else { continue };
                let again = implicit_inexec_laws(&fixed, a, opts).map_err(err)?;
                let same = |y: &atmod::analysis::ImplicitInexecFinding| {
                    y.clause == x.clause && y.subset.iter().map(|&i| LawRef::Effect(i)).collect::<Vec<_>>() == subset
                };
                if again.iter().any(same) {
                    return Err(describe(&s, &x.query().to_string(), t));
                }
            }
        }
    }
    Ok(applied)
}

fn describe(s: &RepairSuggestion, finding: &str, t: &ActionTheory) -> String {
    format!("{:?} {} => {} keeps {finding}\n{}", s.kind, s.target, s.replacement, t.print())
}
