//! Images, reachability and fair-state fixpoints over an augmented model.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bdd::{Bdd, BddManager};
use crate::encode::{EncodedModel, OrderError, VarOrder};
use crate::ltl::{negate_property, Ltl, LtlError};
use crate::model::Model;
use crate::tableau::{build_tableau, AugmentedModel};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Ltl(#[from] LtlError),
}

/// Work counters and per-phase wall-clock time of a session.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    /// Evaluations of the unconstrained fair-state fixpoint.
    pub fixpoint_runs: u64,
    /// Evaluations of the fair-state fixpoint under a global or cycle
    /// constraint.
    pub gc_fixpoint_runs: u64,
    pub image_calls: u64,
    pub preimage_calls: u64,
    /// Milliseconds spent per phase.
    pub millis: BTreeMap<String, f64>,
}

/// A model, its tableau for one formula, and every fixpoint computed so far.
pub struct AnalysisSession {
    pub mgr: BddManager,
    pub aug: AugmentedModel,
    reachable: Option<Bdd>,
    /// Augmented states reachable from `I_φ ∧ S_φ`.
    space: Option<Bdd>,
    restrict_to_reachable: bool,
    fair: Option<Bdd>,
    fair_gc: HashMap<(Bdd, Option<Bdd>), Bdd>,
    /// Insertion order of `fair_gc`, for deterministic reuse.
    fair_gc_order: Vec<(Bdd, Option<Bdd>)>,
    stats: SessionStats,
}

impl std::fmt::Debug for AnalysisSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalysisSession")
            .field("mgr", &self.mgr)
            .field("stats", &self.stats)
            .finish()
    }
}

impl AnalysisSession {
    /// Session searching for behaviours satisfying `phi` (the negated
    /// property, in negation normal form).
    pub fn new(model: &Model, phi: &Ltl, order: &VarOrder) -> Result<Self, SessionError> {
        let (mut mgr, em) = EncodedModel::new(model, order)?;
        let aug = build_tableau(&mut mgr, em, phi)?;
        Ok(AnalysisSession {
            mgr,
            aug,
            reachable: None,
            space: None,
            restrict_to_reachable: true,
            fair: None,
            fair_gc: HashMap::new(),
            fair_gc_order: Vec::new(),
            stats: SessionStats::default(),
        })
    }

    /// Session searching for counterexamples to the safety property `safe`.
    pub fn for_property(model: &Model, safe: &Ltl, order: &VarOrder) -> Result<Self, SessionError> {
        Self::new(model, &negate_property(safe), order)
    }

    /// By default every fair-state fixpoint is evaluated inside the augmented
    /// states reachable from `I_φ ∧ S_φ`, which is closed under successors,
    /// so the results agree with the unrestricted ones on every state a
    /// counterexample can visit. Passing `false` evaluates the fixpoints over
    /// the whole encoded state space instead. Must be set before the first
    /// fixpoint is computed.
    pub fn set_restrict_to_reachable(&mut self, on: bool) {
        assert!(self.fair.is_none(), "fixpoints already computed");
        self.restrict_to_reachable = on;
    }

    pub fn stats(&self) -> &SessionStats {
        &self.stats
    }

    pub fn add_millis(&mut self, phase: &str, since: Instant) {
        let ms = since.elapsed().as_secs_f64() * 1000.0;
        *self.stats.millis.entry(phase.to_string()).or_insert(0.0) += ms;
    }

    /// `I_φ ∧ S_φ`: initial augmented states committed to the formula.
    pub fn initial_committed(&mut self) -> Bdd {
        let (i, s) = (self.aug.initial, self.aug.commitment);
        self.mgr.and(i, s)
    }

    // ----- image and preimage ------------------------------------------------

    /// Successors of `s` under block `b`, over current-state variables.
    pub fn image_block(&mut self, b: usize, s: Bdd) -> Bdd {
        self.stats.image_calls += 1;
        let rel = self.aug.relations[b];
        let next = self.mgr.and_exists(s, rel, &self.aug.cur_set);
        self.mgr
            .rename(next, &self.aug.to_cur)
            .expect("next-to-current rename preserves order")
    }

    pub fn preimage_block(&mut self, b: usize, s: Bdd) -> Bdd {
        self.stats.preimage_calls += 1;
        let rel = self.aug.relations[b];
        let s_next = self
            .mgr
            .rename(s, &self.aug.to_next)
            .expect("current-to-next rename preserves order");
        self.mgr.and_exists(rel, s_next, &self.aug.next_set)
    }

    pub fn image(&mut self, s: Bdd) -> Bdd {
        let mut acc = self.mgr.ff();
        for b in 0..self.aug.num_blocks() {
            let i = self.image_block(b, s);
            acc = self.mgr.or(acc, i);
        }
        acc
    }

    pub fn preimage(&mut self, s: Bdd) -> Bdd {
        let mut acc = self.mgr.ff();
        for b in 0..self.aug.num_blocks() {
            let p = self.preimage_block(b, s);
            acc = self.mgr.or(acc, p);
        }
        acc
    }

    /// Base-model states reachable from the initial state (tableau variables
    /// quantified away).
    pub fn reachable(&mut self) -> Bdd {
        if let Some(r) = self.reachable {
            return r;
        }
        let start = Instant::now();
        let el: Vec<_> = self.aug.elementary.iter().map(|e| e.cur).collect();
        let el_set = self.mgr.var_set(&el).expect("in range");
        let mut reached = self.aug.initial;
        let mut frontier = reached;
        while !frontier.is_false() {
            let img = self.image(frontier);
            let img = self.mgr.exists(&el_set, img);
            frontier = self.mgr.diff(img, reached);
            reached = self.mgr.or(reached, frontier);
        }
        self.reachable = Some(reached);
        self.add_millis("reachability", start);
        reached
    }

    /// Augmented states reachable from `I_φ ∧ S_φ` (the whole valid space
    /// when reachability restriction is off). Computed once per session.
    pub fn state_space(&mut self) -> Bdd {
        if let Some(r) = self.space {
            return r;
        }
        let r = if self.restrict_to_reachable {
            let start = Instant::now();
            let init = self.initial_committed();
            let mut reached = self.mgr.and(init, self.aug.valid);
            let mut frontier = reached;
            while !frontier.is_false() {
                let img = self.image(frontier);
                frontier = self.mgr.diff(img, reached);
                reached = self.mgr.or(reached, frontier);
            }
            self.add_millis("reachability", start);
            reached
        } else {
            self.aug.valid
        };
        self.space = Some(r);
        r
    }

    /// `μY. target ∨ (within ∧ pre(Y))`, by frontier iteration.
    pub fn backward_reach(&mut self, target: Bdd, within: Bdd) -> Bdd {
        let mut reached = target;
        let mut frontier = target;
        while !frontier.is_false() {
            let pre = self.preimage(frontier);
            let pre = self.mgr.and(pre, within);
            frontier = self.mgr.diff(pre, reached);
            reached = self.mgr.or(reached, frontier);
        }
        reached
    }

    /// `νZ. gc ∧ ⋀_c pre(μY. (Z ∧ c) ∨ pre(Y))` inside the state space,
    /// iterated from `start`, which must contain the fixpoint.
    fn fair_fixpoint(&mut self, gc: Bdd, constraints: &[Bdd], start: Bdd) -> Bdd {
        let space = self.state_space();
        let mut z = self.mgr.and(start, gc);
        z = self.mgr.and(z, space);
        loop {
            let mut nz = self.mgr.and(gc, z);
            for &c in constraints {
                let zc = self.mgr.and(z, c);
                let y = self.backward_reach(zc, space);
                let p = self.preimage(y);
                nz = self.mgr.and(nz, p);
                if nz.is_false() {
                    break;
                }
            }
            if nz == z {
                return z;
            }
            z = nz;
        }
    }

    /// Augmented states from which some path meets every fairness constraint
    /// infinitely often. Computed once per session.
    pub fn fair_states(&mut self) -> Bdd {
        if let Some(f) = self.fair {
            return f;
        }
        self.state_space();
        let start = Instant::now();
        self.stats.fixpoint_runs += 1;
        let tt = self.mgr.tt();
        let constraints = self.aug.fairness.clone();
        let valid = self.aug.valid;
        let f = self.fair_fixpoint(tt, &constraints, valid);
        self.fair = Some(f);
        self.add_millis("fair_states", start);
        f
    }

    /// Fair states under global constraint `gc`.
    pub fn fair_states_gc(&mut self, gc: Bdd) -> Bdd {
        self.fair_states_constrained(gc, None)
    }

    /// Fair states under global constraint `gc` where, additionally, `cc`
    /// must hold infinitely often (treated as one more fairness constraint).
    /// Results are cached per `(gc, cc)`; a new evaluation starts from the
    /// intersection of all cached results for weaker constraints.
    pub fn fair_states_constrained(&mut self, gc: Bdd, cc: Option<Bdd>) -> Bdd {
        let cc = cc.filter(|c| !c.is_true());
        if gc.is_true() && cc.is_none() {
            return self.fair_states();
        }
        if let Some(&r) = self.fair_gc.get(&(gc, cc)) {
            return r;
        }
        let fair = self.fair_states();
        let start = Instant::now();
        self.stats.gc_fixpoint_runs += 1;
        let mut seed = fair;
        for i in 0..self.fair_gc_order.len() {
            let key = self.fair_gc_order[i];
            let (gc2, cc2) = key;
            if (cc2.is_none() || cc2 == cc) && self.mgr.leq(gc, gc2) {
                let r = self.fair_gc[&key];
                seed = self.mgr.and(seed, r);
            }
        }
        let mut constraints = self.aug.fairness.clone();
        constraints.extend(cc);
        let result = self.fair_fixpoint(gc, &constraints, seed);
        self.fair_gc.insert((gc, cc), result);
        self.fair_gc_order.push((gc, cc));
        self.add_millis("fair_states_gc", start);
        result
    }

    /// Whether some initial committed state is fair under `gc`.
    pub fn has_counterexample(&mut self, gc: Bdd) -> bool {
        self.has_counterexample_cc(gc, None)
    }

    pub fn has_counterexample_cc(&mut self, gc: Bdd, cc: Option<Bdd>) -> bool {
        let f = self.fair_states_constrained(gc, cc);
        let init = self.initial_committed();
        self.mgr.intersects(init, f)
    }

    /// Encoded `var = value` over current-state bits, for building
    /// constraints by name.
    pub fn value_bdd(&mut self, var: &str, value: &str) -> Option<Bdd> {
        let m = &self.aug.base.model;
        let v = m.var_id(var)?;
        let x = m.variables[v].value_index(value)?;
        Some(self.aug.base.map.value(&mut self.mgr, v, x, false))
    }
}
