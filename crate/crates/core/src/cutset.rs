//! Cut sets: extraction from counterexample cycles, minimality checks,
//! exclusion and cardinality constraints, and the two MCS strategies.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bdd::Bdd;
use crate::cex::{find_counterexample, otf_check, path_json, path_states, SymbolicPath};
use crate::fixpoint::AnalysisSession;
use crate::model::{Model, VarId};
use crate::report::{Counters, McsEntry, McsReport, RoundStat, Timings};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutSetError {
    #[error("unknown basic event `{0}`")]
    UnknownEvent(String),
    #[error("cardinality bound {n} outside 0..={max}")]
    OutOfRange { n: usize, max: usize },
}

/// The basic event flags of a model, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSetUniverse {
    names: Vec<String>,
    vars: Vec<VarId>,
}

impl CutSetUniverse {
    pub fn from_model(m: &Model) -> Self {
        let vars = m.events();
        let names = vars.iter().map(|&v| m.variables[v].name.clone()).collect();
        CutSetUniverse { names, vars }
    }

    /// Number of basic events.
    pub fn max(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// A cut set from event names; duplicates are dropped and the result
    /// follows universe order.
    pub fn cut_set<S: AsRef<str>>(&self, names: &[S]) -> Result<CutSet, CutSetError> {
        for n in names {
            if !self.names.iter().any(|x| x == n.as_ref()) {
                return Err(CutSetError::UnknownEvent(n.as_ref().to_string()));
            }
        }
        Ok(CutSet {
            events: self
                .names
                .iter()
                .filter(|x| names.iter().any(|n| n.as_ref() == x.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// `flag = true` for the `i`-th event.
    fn flag(&self, sess: &mut AnalysisSession, i: usize) -> Bdd {
        sess.aug
            .base
            .map
            .value(&mut sess.mgr, self.vars[i], 1, false)
    }

    fn index(&self, name: &str) -> usize {
        self.names
            .iter()
            .position(|n| n == name)
            .expect("cut set drawn from this universe")
    }
}

/// A set of basic events, listed in universe order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CutSet {
    pub events: Vec<String>,
}

impl CutSet {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.events.iter().any(|e| e == name)
    }

    pub fn is_subset(&self, other: &CutSet) -> bool {
        self.events.iter().all(|e| other.contains(e))
    }
}

impl fmt::Display for CutSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.events.join(", "))
    }
}

/// Reads the cut set off a symbolic state: the first cube of its irredundant
/// cover, with flags the cube leaves open set to false whenever the cube
/// restricted that way still meets `context`.
pub fn extract_from_state(
    sess: &mut AnalysisSession,
    state: Bdd,
    u: &CutSetUniverse,
    context: Bdd,
) -> CutSet {
    let cubes = sess.mgr.isop(state);
    let cube = cubes.first().expect("non-empty state");
    let mut current = sess.mgr.cube(cube).expect("variables in range");
    let mut events = Vec::new();
    for i in 0..u.max() {
        let f = u.flag(sess, i);
        let nf = sess.mgr.not(f);
        if sess.mgr.leq(current, f) {
            events.push(u.names[i].clone());
        } else if !sess.mgr.leq(current, nf) {
            let off = sess.mgr.and(current, nf);
            let meets = sess.mgr.and(off, context);
            if meets.is_false() {
                current = sess.mgr.and(current, f);
                events.push(u.names[i].clone());
            } else {
                current = off;
            }
        }
    }
    CutSet { events }
}

/// The cut set of a counterexample: the events that have occurred in the
/// state where its cycle starts.
pub fn extract_cutset(
    sess: &mut AnalysisSession,
    path: &SymbolicPath,
    u: &CutSetUniverse,
) -> CutSet {
    let states = path_states(sess, path);
    let start = states[path.cycle_start()];
    let context = path.witness[path.cycle_start()];
    extract_from_state(sess, start, u, context)
}

/// States in which every event outside `cs` is absent and at least one event
/// of `cs` is absent.
pub fn minimality_constraint(sess: &mut AnalysisSession, cs: &CutSet, u: &CutSetUniverse) -> Bdd {
    let mut outside = sess.mgr.tt();
    let mut some_missing = sess.mgr.ff();
    for i in 0..u.max() {
        let f = u.flag(sess, i);
        let nf = sess.mgr.not(f);
        if cs.contains(&u.names[i]) {
            some_missing = sess.mgr.or(some_missing, nf);
        } else {
            outside = sess.mgr.and(outside, nf);
        }
    }
    sess.mgr.and(outside, some_missing)
}

/// `¬(⋀ cs)`: rules out every behaviour in which all of `cs` occurred.
pub fn exclusion_constraint(sess: &mut AnalysisSession, cs: &CutSet, u: &CutSetUniverse) -> Bdd {
    let mut all = sess.mgr.tt();
    for e in &cs.events {
        let f = u.flag(sess, u.index(e));
        all = sess.mgr.and(all, f);
    }
    sess.mgr.not(all)
}

/// States in which at most `n` events have occurred.
pub fn cardinality_cycle_constraint(
    sess: &mut AnalysisSession,
    u: &CutSetUniverse,
    n: usize,
) -> Result<Bdd, CutSetError> {
    let max = u.max();
    if n > max {
        return Err(CutSetError::OutOfRange { n, max });
    }
    // at_most[k]: at most k of the flags processed so far are true
    let mut at_most: Vec<Bdd> = vec![sess.mgr.tt(); n + 1];
    for i in (0..max).rev() {
        let f = u.flag(sess, i);
        let mut next = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let if_true = if k == 0 {
                sess.mgr.ff()
            } else {
                at_most[k - 1]
            };
            next.push(sess.mgr.ite(f, if_true, at_most[k]));
        }
        at_most = next;
    }
    Ok(at_most[n])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Minimality {
    Minimal,
    Smaller(CutSet, SymbolicPath),
}

/// Decides whether some proper subset of `cs` is also a cut set; if so,
/// returns one together with its counterexample.
pub fn verify_minimal(sess: &mut AnalysisSession, cs: &CutSet, u: &CutSetUniverse) -> Minimality {
    if cs.is_empty() {
        return Minimality::Minimal;
    }
    let gc = minimality_constraint(sess, cs, u);
    if !sess.has_counterexample(gc) {
        return Minimality::Minimal;
    }
    let path = find_counterexample(sess, gc, None).expect("fair initial state admits a lasso");
    let smaller = extract_cutset(sess, &path, u);
    assert!(
        smaller.is_subset(cs) && smaller.len() < cs.len(),
        "minimality constraint yields a proper subset"
    );
    Minimality::Smaller(smaller, path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Naive,
    Systematic,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::Systematic => "systematic",
        }
    }
}

/// How the naive strategy finds each round's counterexample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Directed,
    Onthefly,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Directed => "directed",
            Mode::Onthefly => "onthefly",
        }
    }
}

struct Recorder {
    start: Instant,
    round_start: Instant,
    entries: Vec<McsEntry>,
    rounds: Vec<RoundStat>,
}

impl Recorder {
    fn new() -> Self {
        let now = Instant::now();
        Recorder {
            start: now,
            round_start: now,
            entries: Vec::new(),
            rounds: Vec::new(),
        }
    }

    fn record(
        &mut self,
        sess: &AnalysisSession,
        cs: &CutSet,
        ics: Option<&CutSet>,
        path: &SymbolicPath,
    ) {
        let iteration = self.entries.len() + 1;
        self.entries.push(McsEntry {
            events: cs.events.clone(),
            iteration,
            initial_cut_set: ics.map(|c| c.events.clone()),
            witness: Some(path_json(sess, path)),
        });
        self.rounds.push(RoundStat {
            iteration,
            ics_size: ics.map_or(cs.len(), CutSet::len),
            mcs_size: cs.len(),
            seconds: Some(self.round_start.elapsed().as_secs_f64()),
            cumulative_seconds: Some(self.start.elapsed().as_secs_f64()),
        });
        self.round_start = Instant::now();
    }

    fn finish(
        self,
        sess: &AnalysisSession,
        u: &CutSetUniverse,
        strategy: Strategy,
        mode: Option<Mode>,
    ) -> McsReport {
        let stats = sess.stats();
        McsReport {
            source: "symbolic".into(),
            strategy: strategy.name().into(),
            mode: mode.map(|m| m.name().into()),
            universe: u.names.clone(),
            mcs: self.entries,
            rounds: self.rounds,
            counters: Some(Counters::from(stats)),
            timings: Some(Timings {
                total_ms: self.start.elapsed().as_secs_f64() * 1000.0,
                phases: stats.millis.clone(),
            }),
        }
    }
}

/// Naive strategy: find any counterexample under the accumulated global
/// constraint, shrink its cut set until minimal, exclude it, repeat.
pub fn run_naive(sess: &mut AnalysisSession, mode: Mode) -> McsReport {
    let u = CutSetUniverse::from_model(&sess.aug.base.model);
    let mut rec = Recorder::new();
    sess.fair_states();
    let mut gc = sess.mgr.tt();
    loop {
        let path = match mode {
            Mode::Directed => find_counterexample(sess, gc, None),
            Mode::Onthefly => {
                if sess.has_counterexample(gc) {
                    Some(otf_check(sess, gc).expect("a counterexample exists"))
                } else {
                    None
                }
            }
        };
        let Some(mut path) = path else { break };
        let ics = extract_cutset(sess, &path, &u);
        let mut cs = ics.clone();
        while let Minimality::Smaller(smaller, p) = verify_minimal(sess, &cs, &u) {
            cs = smaller;
            path = p;
        }
        rec.record(sess, &cs, Some(&ics), &path);
        if cs.is_empty() {
            break;
        }
        let ex = exclusion_constraint(sess, &cs, &u);
        gc = sess.mgr.and(gc, ex);
    }
    rec.finish(sess, &u, Strategy::Naive, Some(mode))
}

/// Systematic strategy: for `n = 0..=MAX`, exhaust counterexamples whose
/// cycle has at most `n` events; each cut set found is minimal.
pub fn run_systematic(sess: &mut AnalysisSession) -> McsReport {
    let u = CutSetUniverse::from_model(&sess.aug.base.model);
    let mut rec = Recorder::new();
    sess.fair_states();
    let mut gc = sess.mgr.tt();
    'levels: for n in 0..=u.max() {
        let cc = cardinality_cycle_constraint(sess, &u, n).expect("n within range");
        while let Some(path) = find_counterexample(sess, gc, Some(cc)) {
            let cs = extract_cutset(sess, &path, &u);
            debug_assert_eq!(cs.len(), n);
            rec.record(sess, &cs, None, &path);
            if cs.is_empty() {
                break 'levels;
            }
            let ex = exclusion_constraint(sess, &cs, &u);
            gc = sess.mgr.and(gc, ex);
        }
    }
    rec.finish(sess, &u, Strategy::Systematic, None)
}
