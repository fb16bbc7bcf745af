//! Kripke semantics for theories: models, the dependence-model conditions,
//! the big model, the pruned maximal frame used to decide consequence, and
//! a brute-force countermodel search kept independent of the frame.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::classical::{max_atoms, Compiled, EngineError, Universe, Valuation};
use crate::syntax::{Atom, Formula, Literal, Query};
use crate::theory::{ActionTheory, TheoryError};

/// Upper bound on stored candidate edges in a frame, summed over actions.
pub const MAX_FRAME_EDGES: u64 = 1 << 24;
pub const ENUM_MAX_FLUENTS: usize = 4;
pub const ENUM_DEFAULT_WORLDS: usize = 4;
pub const ENUM_MAX_WORLDS: usize = 8;
/// Worlds sharing one valuation in an enumerated model.
pub const ENUM_PER_VALUATION: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("frame would hold {edges} candidate edges, above the limit of {limit}")]
    FrameTooLarge { edges: u64, limit: u64 },
    #[error("countermodel search supports at most {limit} fluents and {worlds} worlds (got {fluents} fluents, {requested} worlds)")]
    EnumerationBounds { fluents: usize, requested: usize, limit: usize, worlds: usize },
    #[error("world {0} does not exist")]
    UnknownWorld(usize),
    #[error("model and theory disagree on the fluent list")]
    VocabularyMismatch,
}

/// Worlds are indices into `worlds`; `rel` only mentions existing worlds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    pub fluents: Vec<Atom>,
    pub worlds: Vec<Valuation>,
    pub rel: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

impl KripkeModel {
    pub fn successors<'a>(&'a self, action: &str, w: usize) -> impl Iterator<Item = usize> + 'a {
        self.rel.get(action).into_iter().flat_map(move |r| r.range((w, 0)..=(w, usize::MAX)).map(|&(_, t)| t))
    }

    fn universe(&self) -> Result<Universe, KripkeError> {
        Ok(Universe::new(self.fluents.iter().cloned())?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let worlds: Vec<JsonWorld> = self
            .worlds
            .iter()
            .enumerate()
            .map(|(i, v)| JsonWorld {
                id: i,
                fluents: self.fluents.iter().enumerate().map(|(j, a)| (a.to_string(), v.get(j))).collect(),
            })
            .collect();
        let relations: BTreeMap<String, Vec<[usize; 2]>> =
            self.rel.iter().map(|(a, r)| (a.clone(), r.iter().map(|&(x, y)| [x, y]).collect())).collect();
        serde_json::to_value(JsonModel {
            fluents: self.fluents.iter().map(|a| a.to_string()).collect(),
            worlds,
            relations,
        })
        .expect("model serializes")
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph model {\n  node [shape=box];\n");
        for (i, v) in self.worlds.iter().enumerate() {
            let label: Vec<String> = self
                .fluents
                .iter()
                .enumerate()
                .map(|(j, a)| if v.get(j) { a.to_string() } else { format!("~{a}") })
                .collect();
            let _ = writeln!(s, "  w{i} [label=\"w{i}\\n{}\"];", label.join(" "));
        }
        for (a, r) in &self.rel {
            for (x, y) in r {
                let _ = writeln!(s, "  w{x} -> w{y} [label=\"{a}\"];");
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Serialize)]
struct JsonWorld {
    id: usize,
    fluents: BTreeMap<String, bool>,
}

#[derive(Serialize)]
struct JsonModel {
    fluents: Vec<String>,
    worlds: Vec<JsonWorld>,
    relations: BTreeMap<String, Vec<[usize; 2]>>,
}

/// Truth of a depth-one statement at world `w`.
pub fn holds_at(m: &KripkeModel, w: usize, q: &Query) -> Result<bool, KripkeError> {
    if w >= m.worlds.len() {
        return Err(KripkeError::UnknownWorld(w));
    }
    let u = m.universe()?;
    let at = |f: &Formula, x: usize| -> Result<bool, KripkeError> { Ok(u.compile(f)?.eval(m.worlds[x])) };
    Ok(match q {
        Query::Classical(f) => at(f, w)?,
        Query::Box { action, antecedent, consequent } => {
            if !at(antecedent, w)? {
                true
            } else {
                let mut ok = true;
                for t in m.successors(action, w) {
                    ok &= at(consequent, t)?;
                }
                ok
            }
        }
        Query::Diamond { action, antecedent } => !at(antecedent, w)? || m.successors(action, w).next().is_some(),
    })
}

/// Bits an action may not flip: `pos` atoms cannot become true, `neg` atoms cannot become false.
#[derive(Clone, Copy, Debug)]
struct Frozen {
    pos: u64,
    neg: u64,
}

impl Frozen {
    fn of(t: &ActionTheory, u: &Universe, action: &str) -> Frozen {
        let mut f = Frozen { pos: 0, neg: 0 };
        for (i, p) in u.atoms().iter().enumerate() {
            if !t.dependence.depends(action, &Literal::pos(p.clone())) {
                f.pos |= 1 << i;
            }
            if !t.dependence.depends(action, &Literal::neg(p.clone())) {
                f.neg |= 1 << i;
            }
        }
        f
    }

    fn allows(self, v: Valuation, w: Valuation) -> bool {
        (w.0 & !v.0 & self.pos) == 0 && (v.0 & !w.0 & self.neg) == 0
    }
}

/// `(w,w')` in `rel[a]` respects every independence `(a, ~l)` under the theory's dependence.
pub fn is_dep_model(m: &KripkeModel, t: &ActionTheory) -> Result<bool, KripkeError> {
    if m.fluents != t.domain.fluents {
        return Err(KripkeError::VocabularyMismatch);
    }
    let u = m.universe()?;
    for (a, r) in &m.rel {
        t.action_index(a)?;
        let fr = Frozen::of(t, &u, a);
        for &(x, y) in r {
            if x >= m.worlds.len() || y >= m.worlds.len() {
                return Err(KripkeError::UnknownWorld(x.max(y)));
            }
            if !fr.allows(m.worlds[x], m.worlds[y]) {
                return Ok(false);
            }
        }
    }
    let laws: Vec<Query> = t.all_laws().iter().map(|l| l.to_query()).collect();
    for w in 0..m.worlds.len() {
        for q in &laws {
            if !holds_at(m, w, q)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

struct CompiledAction {
    boxes: Vec<(Compiled, Compiled)>,
    execs: Vec<Compiled>,
    frozen: Frozen,
}

struct CompiledTheory {
    universe: Universe,
    statics: Vec<Compiled>,
    actions: Vec<CompiledAction>,
}

impl CompiledTheory {
    fn new(t: &ActionTheory) -> Result<CompiledTheory, KripkeError> {
        let universe = Universe::new(t.domain.fluents.iter().cloned())?;
        let statics = t.statics.iter().map(|s| universe.compile(&s.formula)).collect::<Result<Vec<_>, _>>()?;
        let mut actions = Vec::new();
        for (a, laws) in t.domain.actions.iter().zip(&t.actions) {
            let mut boxes = Vec::new();
            for b in t.consq(a)? {
                boxes.push((universe.compile(&b.antecedent)?, universe.compile(&b.consequent)?));
            }
            let execs =
                laws.executabilities.iter().map(|x| universe.compile(&x.antecedent)).collect::<Result<Vec<_>, _>>()?;
            actions.push(CompiledAction { boxes, execs, frozen: Frozen::of(t, &universe, a) });
        }
        Ok(CompiledTheory { universe, statics, actions })
    }

    fn static_ok(&self, v: Valuation) -> bool {
        self.statics.iter().all(|s| s.eval(v))
    }
}

/// The surviving valuations and permitted edges after executability pruning.
#[derive(Clone, Debug)]
pub struct PrunedFrame {
    universe: Universe,
    actions: Vec<String>,
    initial: Vec<Valuation>,
    surviving: Vec<Valuation>,
    alive: Vec<bool>,
    // candidate edges over the initial set, per action, indexed by valuation bits
    succ: Vec<Vec<Vec<Valuation>>>,
    exec_covered: Vec<Vec<bool>>,
    inexec_covered: Vec<Vec<bool>>,
}

impl PrunedFrame {
    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// `Val(S)`: valuations satisfying every static law.
    pub fn initial(&self) -> &[Valuation] {
        &self.initial
    }

    /// `W*`.
    pub fn surviving(&self) -> &[Valuation] {
        &self.surviving
    }

    pub fn contains(&self, v: Valuation) -> bool {
        self.alive[v.0 as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.surviving.is_empty()
    }

    fn index(&self, action: &str) -> usize {
        self.actions.iter().position(|a| a == action).expect("action of this frame")
    }

    /// `R*[a](v)`: surviving successors of a surviving valuation.
    pub fn successors(&self, action: &str, v: Valuation) -> Vec<Valuation> {
        if !self.contains(v) {
            return Vec::new();
        }
        self.succ[self.index(action)][v.0 as usize].iter().copied().filter(|w| self.contains(*w)).collect()
    }

    /// Candidate successors over `Val(S)` before pruning.
    pub fn candidate_successors(&self, action: &str, v: Valuation) -> &[Valuation] {
        &self.succ[self.index(action)][v.0 as usize]
    }

    /// `R*[a]` restricted to `W*`.
    pub fn maxrel(&self, action: &str) -> Vec<(Valuation, Valuation)> {
        self.surviving.iter().flat_map(|&v| self.successors(action, v).into_iter().map(move |w| (v, w))).collect()
    }

    /// Some executability antecedent of `action` holds at `v`.
    pub fn exec_applies(&self, action: &str, v: Valuation) -> bool {
        self.exec_covered[self.index(action)][v.0 as usize]
    }

    /// Some inexecutability antecedent of `action` holds at `v`.
    pub fn inexec_applies(&self, action: &str, v: Valuation) -> bool {
        self.inexec_covered[self.index(action)][v.0 as usize]
    }

    /// The frame as a model over `W*`, or `None` when nothing survives.
    pub fn to_model(&self) -> Option<KripkeModel> {
        if self.surviving.is_empty() {
            return None;
        }
        let pos: BTreeMap<Valuation, usize> = self.surviving.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let rel = self
            .actions
            .iter()
            .map(|a| (a.clone(), self.maxrel(a).into_iter().map(|(v, w)| (pos[&v], pos[&w])).collect()))
            .collect();
        Some(KripkeModel { fluents: self.universe.atoms().to_vec(), worlds: self.surviving.clone(), rel })
    }
}

/// Greatest set of static-law valuations closed under executability demands.
pub fn prune_fixpoint(t: &ActionTheory) -> Result<PrunedFrame, KripkeError> {
    let ct = CompiledTheory::new(t)?;
    let u = &ct.universe;
    let size = u.size() as usize;
    let initial: Vec<Valuation> = u.valuations().filter(|&v| ct.static_ok(v)).collect();
    let n = initial.len() as u64;
    let edges = n.saturating_mul(n).saturating_mul(t.domain.actions.len() as u64);
    if edges > MAX_FRAME_EDGES {
        return Err(KripkeError::FrameTooLarge { edges, limit: MAX_FRAME_EDGES });
    }
    let mut alive = vec![false; size];
    for v in &initial {
        alive[v.0 as usize] = true;
    }
    let mut succ = Vec::with_capacity(ct.actions.len());
    let mut exec_covered: Vec<Vec<bool>> = Vec::with_capacity(ct.actions.len());
    let mut inexec_covered = Vec::with_capacity(ct.actions.len());
    for (a, ca) in t.domain.actions.iter().zip(&ct.actions) {
        // consequent truth sets, so the pair test is a lookup
        let cons_ok: Vec<Vec<bool>> =
            ca.boxes.iter().map(|(_, c)| (0..size).map(|i| c.eval(Valuation(i as u64))).collect()).collect();
        let mut per = vec![Vec::new(); size];
        for &v in &initial {
            let applicable: Vec<usize> =
                ca.boxes.iter().enumerate().filter(|(_, (ant, _))| ant.eval(v)).map(|(k, _)| k).collect();
            per[v.0 as usize] = initial
                .iter()
                .copied()
                .filter(|&w| ca.frozen.allows(v, w) && applicable.iter().all(|&k| cons_ok[k][w.0 as usize]))
                .collect();
        }
        succ.push(per);
        exec_covered.push((0..size).map(|i| ca.execs.iter().any(|x| x.eval(Valuation(i as u64)))).collect());
        let inexecs: Vec<Compiled> =
            t.laws(a)?.inexecutabilities.iter().map(|x| u.compile(&x.antecedent)).collect::<Result<_, _>>()?;
        inexec_covered
            .push((0..size).map(|i| inexecs.iter().any(|x| x.eval(Valuation(i as u64)))).collect::<Vec<bool>>());
    }
    loop {
        let mut changed = false;
        for &v in &initial {
            if !alive[v.0 as usize] {
                continue;
            }
            for k in 0..ct.actions.len() {
                if exec_covered[k][v.0 as usize] && !succ[k][v.0 as usize].iter().any(|w| alive[w.0 as usize]) {
                    alive[v.0 as usize] = false;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let surviving = initial.iter().copied().filter(|v| alive[v.0 as usize]).collect();
    Ok(PrunedFrame {
        universe: ct.universe,
        actions: t.domain.actions.clone(),
        initial,
        surviving,
        alive,
        succ,
        exec_covered,
        inexec_covered,
    })
}

/// Worlds `Val(S)`, edges all pairs allowed by the direct consequences and the dependence relation.
pub fn big_model(t: &ActionTheory) -> Result<KripkeModel, KripkeError> {
    let frame = prune_fixpoint(t)?;
    let pos: BTreeMap<Valuation, usize> = frame.initial.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut rel = BTreeMap::new();
    for a in &t.domain.actions {
        let mut r = BTreeSet::new();
        for &v in &frame.initial {
            for w in frame.candidate_successors(a, v) {
                r.insert((pos[&v], pos[w]));
            }
        }
        rel.insert(a.clone(), r);
    }
    Ok(KripkeModel { fluents: t.domain.fluents.clone(), worlds: frame.initial.clone(), rel })
}

/// Decide a query against an already pruned frame of `t`.
pub fn entails_in_frame(frame: &PrunedFrame, q: &Query) -> Result<bool, KripkeError> {
    let u = frame.universe();
    Ok(match q {
        Query::Classical(f) => {
            let c = u.compile(f)?;
            frame.surviving().iter().all(|&v| c.eval(v))
        }
        Query::Box { action, antecedent, consequent } => {
            let (ant, cons) = (u.compile(antecedent)?, u.compile(consequent)?);
            frame
                .surviving()
                .iter()
                .filter(|&&v| ant.eval(v))
                .all(|&v| frame.successors(action, v).iter().all(|&w| cons.eval(w)))
        }
        Query::Diamond { action, antecedent } => {
            let ant = u.compile(antecedent)?;
            frame.surviving().iter().filter(|&&v| ant.eval(v)).all(|&v| frame.exec_applies(action, v))
        }
    })
}

/// Consequence over all dependence models of `t`.
pub fn entails_dep(t: &ActionTheory, q: &Query) -> Result<bool, KripkeError> {
    t.check_query(q)?;
    let frame = prune_fixpoint(t)?;
    entails_in_frame(&frame, q)
}

/// Consequence over all models, i.e. with every dependence allowed.
pub fn entails_pdl(t: &ActionTheory, q: &Query) -> Result<bool, KripkeError> {
    entails_dep(&t.with_total_dependence(), q)
}

struct Local {
    boxes: Vec<(Compiled, Compiled)>,
    diamonds: Vec<Compiled>,
    frozen: Frozen,
}

/// Search multisets of at most `max_worlds` worlds (valuations used at most
/// twice) and every relation subset for a model of `t` refuting `q`.
pub fn enumerate_countermodel(
    t: &ActionTheory,
    q: &Query,
    max_worlds: usize,
) -> Result<Option<KripkeModel>, KripkeError> {
    t.check_query(q)?;
    let nf = t.domain.fluents.len();
    if nf > ENUM_MAX_FLUENTS || max_worlds > ENUM_MAX_WORLDS || nf > max_atoms() {
        return Err(KripkeError::EnumerationBounds {
            fluents: nf,
            requested: max_worlds,
            limit: ENUM_MAX_FLUENTS,
            worlds: ENUM_MAX_WORLDS,
        });
    }
    let u = Universe::new(t.domain.fluents.iter().cloned())?;
    let statics: Vec<Compiled> = t.statics.iter().map(|s| u.compile(&s.formula)).collect::<Result<_, _>>()?;
    let mut locals = Vec::new();
    for (a, laws) in t.domain.actions.iter().zip(&t.actions) {
        let mut boxes = Vec::new();
        for e in &laws.effects {
            boxes.push((u.compile(&e.antecedent)?, u.compile(&e.consequent)?));
        }
        for x in &laws.inexecutabilities {
            boxes.push((u.compile(&x.antecedent)?, u.compile(&Formula::False)?));
        }
        let diamonds = laws.executabilities.iter().map(|x| u.compile(&x.antecedent)).collect::<Result<_, _>>()?;
        locals.push(Local { boxes, diamonds, frozen: Frozen::of(t, &u, a) });
    }
    let qa = q.action().map(|a| t.action_index(a)).transpose()?;
    let (qant, qcons) = match q {
        Query::Classical(f) => (u.compile(&Formula::True)?, Some(u.compile(f)?)),
        Query::Box { antecedent, consequent, .. } => (u.compile(antecedent)?, Some(u.compile(consequent)?)),
        Query::Diamond { antecedent, .. } => (u.compile(antecedent)?, None),
    };
    let candidates: Vec<Valuation> = u.valuations().filter(|&v| statics.iter().all(|s| s.eval(v))).collect();

    for k in 1..=max_worlds {
        let mut found = None;
        for_each_multiset(candidates.len(), k, ENUM_PER_VALUATION, &mut |idx| {
            let worlds: Vec<Valuation> = idx.iter().map(|&i| candidates[i]).collect();
            if let Some(m) = try_worlds(&worlds, &locals, q, qa, &qant, qcons.as_ref()) {
                found = Some(m);
                return true;
            }
            false
        });
        if let Some((worlds, choice, w0)) = found {
            let rel = t
                .domain
                .actions
                .iter()
                .enumerate()
                .map(|(b, a)| {
                    let mut r = BTreeSet::new();
                    for (w, &mask) in choice[b].iter().enumerate() {
                        for x in 0..worlds.len() {
                            if mask >> x & 1 == 1 {
                                r.insert((w, x));
                            }
                        }
                    }
                    (a.clone(), r)
                })
                .collect();
            let m = KripkeModel { fluents: t.domain.fluents.clone(), worlds, rel };
            assert!(is_dep_model(&m, t)?, "enumerated model violates the theory");
            assert!(!holds_at(&m, w0, q)?, "enumerated model does not refute the query");
            return Ok(Some(m));
        }
    }
    Ok(None)
}

// Successor choice per action per world (bitmask over worlds) plus the refuting world.
type Found = (Vec<Valuation>, Vec<Vec<u32>>, usize);

fn try_worlds(
    worlds: &[Valuation],
    locals: &[Local],
    q: &Query,
    qa: Option<usize>,
    qant: &Compiled,
    qcons: Option<&Compiled>,
) -> Option<Found> {
    let k = worlds.len();
    // all admissible successor sets, per action per world
    let mut options: Vec<Vec<Vec<u32>>> = Vec::with_capacity(locals.len());
    for l in locals {
        let mut per_world = Vec::with_capacity(k);
        for &v in worlds {
            let mut opts = Vec::new();
            for mask in 0u32..(1 << k) {
                let succ = || (0..k).filter(move |x| mask >> x & 1 == 1).map(|x| worlds[x]);
                if !succ().all(|w| l.frozen.allows(v, w)) {
                    continue;
                }
                if !l.boxes.iter().all(|(ant, cons)| !ant.eval(v) || succ().all(|w| cons.eval(w))) {
                    continue;
                }
                if mask == 0 && l.diamonds.iter().any(|d| d.eval(v)) {
                    continue;
                }
                opts.push(mask);
            }
            if opts.is_empty() {
                return None;
            }
            per_world.push(opts);
        }
        options.push(per_world);
    }
    for w0 in 0..k {
        let v0 = worlds[w0];
        let refuting: Option<Option<u32>> = match q {
            Query::Classical(_) => (!qcons.unwrap().eval(v0)).then_some(None),
            Query::Box { .. } => {
                if !qant.eval(v0) {
                    None
                } else {
                    let cons = qcons.unwrap();
                    options[qa.unwrap()][w0]
                        .iter()
                        .copied()
                        .find(|&mask| (0..k).any(|x| mask >> x & 1 == 1 && !cons.eval(worlds[x])))
                        .map(Some)
                }
            }
            Query::Diamond { .. } => {
                if qant.eval(v0) && options[qa.unwrap()][w0].contains(&0) {
                    Some(Some(0))
                } else {
                    None
                }
            }
        };
        if let Some(special) = refuting {
            let mut choice: Vec<Vec<u32>> = options.iter().map(|pw| pw.iter().map(|o| o[0]).collect()).collect();
            if let Some(mask) = special {
                choice[qa.unwrap()][w0] = mask;
            }
            return Some((worlds.to_vec(), choice, w0));
        }
    }
    None
}

/// Nondecreasing index sequences of length `k` over `0..n`, each index used at most `cap` times.
fn for_each_multiset(n: usize, k: usize, cap: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(
        n: usize,
        k: usize,
        cap: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            let used = cur.iter().rev().take_while(|&&x| x == i).count();
            if used >= cap {
                continue;
            }
            cur.push(i);
            let stop = go(n, k, cap, i, cur, f);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    go(n, k, cap, 0, &mut Vec::with_capacity(k), f)
}
