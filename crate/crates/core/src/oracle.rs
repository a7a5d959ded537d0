//! Explicit-state reference checker.
//!
//! Enumerates the reachable state graph of a completed model, builds an
//! explicit tableau automaton for the formula, and decides lasso existence by
//! nested depth-first search over the product. Minimal cut sets are found by
//! enumerating event subsets in order of size. Shares only the model and
//! formula data types with the symbolic engine.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use crate::ltl::{Atom, Ltl, LtlError};
use crate::model::{Model, VarId};

pub const DEFAULT_STATE_BOUND: usize = 1_000_000;
/// Largest event universe [`brute_force_mcs`] accepts.
pub const MAX_ORACLE_FLAGS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("reachable state space exceeds the bound of {0} states")]
    StateBound(usize),
    #[error("{flags} basic events exceed the oracle limit of {limit}")]
    TooManyFlags { flags: usize, limit: usize },
    #[error(transparent)]
    Ltl(#[from] LtlError),
}

/// Reachable states and labelled transitions of a completed model.
#[derive(Clone, Debug)]
pub struct ExplicitGraph {
    pub model: Model,
    pub states: Vec<Vec<usize>>,
    /// Outgoing `(block, target)` pairs per state; state 0 is initial.
    pub edges: Vec<Vec<(usize, u32)>>,
    /// Per block, the set of flags (bit = position in `flags`) it raises.
    raises: Vec<u64>,
    /// Event variables in declaration order.
    pub flags: Vec<VarId>,
}

/// Breadth-first enumeration of the reachable graph of `m` (completed first).
pub fn enumerate(m: &Model, bound: usize) -> Result<ExplicitGraph, OracleError> {
    let model = m.complete();
    let flags = model.events();
    let raises = model
        .blocks
        .iter()
        .map(|b| {
            flags
                .iter()
                .enumerate()
                .filter(|&(_, &f)| b.assigns(f) == Some(1))
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let init = model.initial_state();
    let mut index: HashMap<Vec<usize>, u32> = HashMap::new();
    let mut states = vec![init.clone()];
    index.insert(init, 0);
    let mut edges: Vec<Vec<(usize, u32)>> = Vec::new();
    let mut queue = VecDeque::from([0u32]);
    while let Some(s) = queue.pop_front() {
        let state = states[s as usize].clone();
        let mut out = Vec::new();
        for (b, block) in model.blocks.iter().enumerate() {
            if !block.enabled(&state) {
                continue;
            }
            let next = block.apply(&state);
            let t = match index.get(&next) {
                Some(&t) => t,
                None => {
                    if states.len() >= bound {
                        return Err(OracleError::StateBound(bound));
                    }
                    let t = states.len() as u32;
                    index.insert(next.clone(), t);
                    states.push(next);
                    queue.push_back(t);
                    t
                }
            };
            out.push((b, t));
        }
        if edges.len() <= s as usize {
            edges.resize(s as usize + 1, Vec::new());
        }
        edges[s as usize] = out;
    }
    edges.resize(states.len(), Vec::new());
    Ok(ExplicitGraph {
        model,
        states,
        edges,
        raises,
        flags,
    })
}

impl ExplicitGraph {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn flag_names(&self) -> Vec<String> {
        self.flags
            .iter()
            .map(|&f| self.model.variables[f].name.clone())
            .collect()
    }

    /// Bit mask (over `flags`) of the named events.
    pub fn flag_mask(&self, names: &[String]) -> u64 {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| names.contains(&self.model.variables[f].name))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

// ----- formulas --------------------------------------------------------------

/// Formula in negation normal form with resolved atoms; `G` and `F` kept.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Nf {
    Const(bool),
    Lit(VarId, usize, bool),
    And(Box<Nf>, Box<Nf>),
    Or(Box<Nf>, Box<Nf>),
    Next(Box<Nf>),
    Until(Box<Nf>, Box<Nf>),
    Release(Box<Nf>, Box<Nf>),
    Always(Box<Nf>),
    Eventually(Box<Nf>),
}

fn to_nf(f: &Ltl, positive: bool, m: &Model) -> Result<Nf, LtlError> {
    let b = |x: Nf| Box::new(x);
    Ok(match f {
        Ltl::True => Nf::Const(positive),
        Ltl::False => Nf::Const(!positive),
        Ltl::Atom(a) => {
            let (v, x) = a.resolve(m)?;
            Nf::Lit(v, x, positive)
        }
        Ltl::Not(g) => to_nf(g, !positive, m)?,
        Ltl::And(p, q) if positive => Nf::And(b(to_nf(p, true, m)?), b(to_nf(q, true, m)?)),
        Ltl::And(p, q) => Nf::Or(b(to_nf(p, false, m)?), b(to_nf(q, false, m)?)),
        Ltl::Or(p, q) if positive => Nf::Or(b(to_nf(p, true, m)?), b(to_nf(q, true, m)?)),
        Ltl::Or(p, q) => Nf::And(b(to_nf(p, false, m)?), b(to_nf(q, false, m)?)),
        Ltl::Implies(p, q) if positive => Nf::Or(b(to_nf(p, false, m)?), b(to_nf(q, true, m)?)),
        Ltl::Implies(p, q) => Nf::And(b(to_nf(p, true, m)?), b(to_nf(q, false, m)?)),
        Ltl::Next(g) => Nf::Next(b(to_nf(g, positive, m)?)),
        Ltl::Until(p, q) if positive => Nf::Until(b(to_nf(p, true, m)?), b(to_nf(q, true, m)?)),
        Ltl::Until(p, q) => Nf::Release(b(to_nf(p, false, m)?), b(to_nf(q, false, m)?)),
        Ltl::Release(p, q) if positive => Nf::Release(b(to_nf(p, true, m)?), b(to_nf(q, true, m)?)),
        Ltl::Release(p, q) => Nf::Until(b(to_nf(p, false, m)?), b(to_nf(q, false, m)?)),
        Ltl::Globally(g) if positive => Nf::Always(b(to_nf(g, true, m)?)),
        Ltl::Globally(g) => Nf::Eventually(b(to_nf(g, false, m)?)),
        Ltl::Finally(g) if positive => Nf::Eventually(b(to_nf(g, true, m)?)),
        Ltl::Finally(g) => Nf::Always(b(to_nf(g, false, m)?)),
    })
}

/// Explicit tableau: obligations carried to the next state, one bit each.
struct Tableau {
    root: Nf,
    /// Arguments `g` of the obligations `X g`, by bit position.
    obligations: Vec<Nf>,
    /// Fairness conditions `(f, h)`: whenever `f` is asserted, `h` must hold
    /// eventually; satisfied at a state where `f` is not asserted or `h` is.
    eventualities: Vec<(Nf, Nf)>,
}

impl Tableau {
    fn new(root: Nf) -> Self {
        let mut t = Tableau {
            root: root.clone(),
            obligations: Vec::new(),
            eventualities: Vec::new(),
        };
        t.scan(&root);
        t
    }

    fn oblige(&mut self, f: &Nf) {
        if !self.obligations.contains(f) {
            self.obligations.push(f.clone());
        }
    }

    fn scan(&mut self, f: &Nf) {
        match f {
            Nf::Const(_) | Nf::Lit(..) => {}
            Nf::And(a, b) | Nf::Or(a, b) => {
                self.scan(a);
                self.scan(b);
            }
            Nf::Next(g) => {
                self.scan(g);
                self.oblige(g);
            }
            Nf::Until(a, b) | Nf::Release(a, b) => {
                self.scan(a);
                self.scan(b);
                self.oblige(f);
                if matches!(f, Nf::Until(..)) {
                    self.eventualities.push((f.clone(), (**b).clone()));
                }
            }
            Nf::Always(g) | Nf::Eventually(g) => {
                self.scan(g);
                self.oblige(f);
                if matches!(f, Nf::Eventually(..)) {
                    self.eventualities.push((f.clone(), (**g).clone()));
                }
            }
        }
    }

    fn bit(&self, f: &Nf) -> u32 {
        self.obligations
            .iter()
            .position(|o| o == f)
            .expect("obligation") as u32
    }

    /// Truth of `f` in base state `s` when the obligation bits are `mask`.
    fn holds(&self, f: &Nf, s: &[usize], mask: u32) -> bool {
        let x = |g: &Nf| mask >> self.bit(g) & 1 == 1;
        match f {
            Nf::Const(b) => *b,
            Nf::Lit(v, val, pos) => (s[*v] == *val) == *pos,
            Nf::And(a, b) => self.holds(a, s, mask) && self.holds(b, s, mask),
            Nf::Or(a, b) => self.holds(a, s, mask) || self.holds(b, s, mask),
            Nf::Next(g) => x(g),
            Nf::Until(a, b) => self.holds(b, s, mask) || (self.holds(a, s, mask) && x(f)),
            Nf::Release(a, b) => self.holds(b, s, mask) && (self.holds(a, s, mask) || x(f)),
            Nf::Always(g) => self.holds(g, s, mask) && x(f),
            Nf::Eventually(g) => self.holds(g, s, mask) || x(f),
        }
    }
}

/// The product of a graph with the tableau of one formula, with everything
/// needed for repeated emptiness checks under different event restrictions.
pub struct Product<'g> {
    graph: &'g ExplicitGraph,
    masks: u32,
    /// Per `(state, mask)`: whether the root formula holds.
    root: Vec<bool>,
    /// Per `(state, mask)`: truth of each obligation argument, as a bit mask.
    args: Vec<u32>,
    /// Per `(state, mask)`: bit `i` set iff eventuality `i` is satisfied.
    fair: Vec<u32>,
    constraints: u32,
}

impl<'g> Product<'g> {
    /// Builds the product for `phi`, the behaviour to search for.
    pub fn new(graph: &'g ExplicitGraph, phi: &Ltl) -> Result<Self, OracleError> {
        let tab = Tableau::new(to_nf(phi, true, &graph.model)?);
        let n_obl = tab.obligations.len();
        assert!(n_obl <= 20, "formula too large for the explicit tableau");
        let masks = 1u32 << n_obl;
        let size = graph.num_states() * masks as usize;
        let mut root = vec![false; size];
        let mut args = vec![0u32; size];
        let mut fair = vec![0u32; size];
        for (s, state) in graph.states.iter().enumerate() {
            for mask in 0..masks {
                let i = s * masks as usize + mask as usize;
                root[i] = tab.holds(&tab.root, state, mask);
                for (j, g) in tab.obligations.iter().enumerate() {
                    if tab.holds(g, state, mask) {
                        args[i] |= 1 << j;
                    }
                }
                for (j, (f, h)) in tab.eventualities.iter().enumerate() {
                    if !tab.holds(f, state, mask) || tab.holds(h, state, mask) {
                        fair[i] |= 1 << j;
                    }
                }
            }
        }
        let constraints = tab.eventualities.len().max(1) as u32;
        if tab.eventualities.is_empty() {
            fair.iter_mut().for_each(|f| *f = 1);
        }
        Ok(Product {
            graph,
            masks,
            root,
            args,
            fair,
            constraints,
        })
    }

    fn node(&self, s: u32, mask: u32, counter: u32) -> usize {
        ((s as usize * self.masks as usize) + mask as usize) * self.constraints as usize
            + counter as usize
    }

    fn split(&self, node: usize) -> (u32, u32, u32) {
        let k = self.constraints as usize;
        let m = self.masks as usize;
        let counter = (node % k) as u32;
        let sm = node / k;
        ((sm / m) as u32, (sm % m) as u32, counter)
    }

    fn accepting(&self, node: usize) -> bool {
        let (s, mask, i) = self.split(node);
        i == self.constraints - 1
            && self.fair[s as usize * self.masks as usize + mask as usize] >> i & 1 == 1
    }

    fn successors(&self, node: usize, disallowed: u64, out: &mut Vec<usize>) {
        out.clear();
        let (s, mask, i) = self.split(node);
        let here = s as usize * self.masks as usize + mask as usize;
        let j = if self.fair[here] >> i & 1 == 1 {
            (i + 1) % self.constraints
        } else {
            i
        };
        for &(b, t) in &self.graph.edges[s as usize] {
            if self.graph.raises[b] & disallowed != 0 {
                continue;
            }
            let base = t as usize * self.masks as usize;
            for m2 in 0..self.masks {
                if self.args[base + m2 as usize] == mask {
                    out.push(self.node(t, m2, j));
                }
            }
        }
    }

    /// Whether some lasso using only blocks that raise flags in `allowed`
    /// (bit mask over the graph's flags) satisfies the formula.
    pub fn has_lasso(&self, allowed: u64) -> bool {
        let disallowed = !allowed;
        let n = self.graph.num_states() * self.masks as usize * self.constraints as usize;
        let mut blue = vec![false; n];
        let mut red = vec![false; n];
        let mut on_stack = vec![false; n];
        let mut buf = Vec::new();
        for mask in 0..self.masks {
            if !self.root[mask as usize] {
                continue;
            }
            let start = self.node(0, mask, 0);
            if blue[start] {
                continue;
            }
            // outer search; frames hold (node, successors, next index)
            let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
            blue[start] = true;
            on_stack[start] = true;
            self.successors(start, disallowed, &mut buf);
            stack.push((start, buf.clone(), 0));
            while let Some(frame) = stack.last_mut() {
                if frame.2 < frame.1.len() {
                    let v = frame.1[frame.2];
                    frame.2 += 1;
                    if !blue[v] {
                        blue[v] = true;
                        on_stack[v] = true;
                        self.successors(v, disallowed, &mut buf);
                        stack.push((v, buf.clone(), 0));
                    }
                    continue;
                }
                let (u, _, _) = stack.pop().expect("non-empty");
                if self.accepting(u) && self.red_search(u, disallowed, &mut red, &on_stack) {
                    return true;
                }
                on_stack[u] = false;
            }
        }
        false
    }

    /// Inner search from `seed` for a node on the outer stack (or `seed`).
    fn red_search(
        &self,
        seed: usize,
        disallowed: u64,
        red: &mut [bool],
        on_stack: &[bool],
    ) -> bool {
        let mut buf = Vec::new();
        let mut stack = vec![seed];
        while let Some(u) = stack.pop() {
            self.successors(u, disallowed, &mut buf);
            for &v in &buf {
                if v == seed || on_stack[v] {
                    return true;
                }
                if !red[v] {
                    red[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    }
}

/// Whether the graph, restricted to events in `allowed`, has a lasso
/// satisfying `phi` (the behaviour to search for).
pub fn exists_counterexample(
    g: &ExplicitGraph,
    phi: &Ltl,
    allowed: &[String],
) -> Result<bool, OracleError> {
    let p = Product::new(g, phi)?;
    Ok(p.has_lasso(g.flag_mask(allowed)))
}

/// All minimal event sets admitting a lasso satisfying `phi`, sorted by size
/// then lexicographically by flag position. Each set lists flag names in
/// declaration order.
pub fn brute_force_mcs(g: &ExplicitGraph, phi: &Ltl) -> Result<Vec<Vec<String>>, OracleError> {
    let max = g.flags.len();
    if max > MAX_ORACLE_FLAGS {
        return Err(OracleError::TooManyFlags {
            flags: max,
            limit: MAX_ORACLE_FLAGS,
        });
    }
    let p = Product::new(g, phi)?;
    let mut found: Vec<u64> = Vec::new();
    for size in 0..=max as u32 {
        let mut candidates: Vec<u64> = (0u64..1 << max)
            .filter(|s| s.count_ones() == size)
            .filter(|s| found.iter().all(|&f| f & s != f))
            .collect();
        candidates.sort_unstable_by_key(|s| s.reverse_bits());
        let hits: Vec<u64> = candidates
            .par_iter()
            .filter(|&&s| p.has_lasso(s))
            .copied()
            .collect();
        found.extend(hits);
        if found.contains(&0) {
            break;
        }
    }
    let names = g.flag_names();
    Ok(found
        .into_iter()
        .map(|s| {
            (0..max)
                .filter(|i| s >> i & 1 == 1)
                .map(|i| names[i].clone())
                .collect()
        })
        .collect())
}

/// Checks a lasso given as block names against the model and formula
/// directly: every block must be enabled where taken, the cycle must return
/// to its first state, `phi` must hold on the resulting infinite word, and
/// `state_ok` must hold in every visited state. Returns the visited states
/// (prefix followed by one pass of the cycle) on success.
pub fn replay_lasso(
    m: &Model,
    phi: &Ltl,
    initial: &[usize],
    prefix: &[String],
    cycle: &[String],
    state_ok: &dyn Fn(&[usize]) -> bool,
) -> Result<Vec<Vec<usize>>, String> {
    let model = m.complete();
    if cycle.is_empty() {
        return Err("empty cycle".into());
    }
    let mut states = vec![initial.to_vec()];
    for name in prefix.iter().chain(cycle) {
        let b = model
            .block_id(name)
            .ok_or_else(|| format!("unknown block `{name}`"))?;
        let s = states.last().expect("non-empty");
        if !model.blocks[b].enabled(s) {
            return Err(format!(
                "block `{name}` not enabled at step {}",
                states.len() - 1
            ));
        }
        let next = model.blocks[b].apply(s);
        states.push(next);
    }
    let loop_start = prefix.len();
    let last = states.pop().expect("non-empty");
    if last != states[loop_start] {
        return Err("cycle does not return to its first state".into());
    }
    if let Some(i) = states.iter().position(|s| !state_ok(s)) {
        return Err(format!("state {i} violates the global constraint"));
    }
    phi.check_atoms(&model).map_err(|e| e.to_string())?;
    let holds = |a: &Atom, i: usize| {
        let (v, x) = a.resolve(&model).expect("checked");
        states[i][v] == x
    };
    let truth = phi.eval_lasso(states.len(), loop_start, &holds);
    if !truth[0] {
        return Err("formula does not hold on the lasso".into());
    }
    Ok(states)
}
