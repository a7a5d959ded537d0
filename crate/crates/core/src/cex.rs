//! Counterexample lassos: directed construction inside the fair states, and
//! an on-the-fly nested depth-first search that needs no fixpoint.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bdd::Bdd;
use crate::fixpoint::AnalysisSession;

/// A lasso `(I, prefix, cycle)` over block indices. `witness` holds one
/// concrete augmented state per step: `witness[0]` is `initial`, and
/// `witness[prefix.len()]` is the state the cycle starts from and returns to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPath {
    pub initial: Bdd,
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
    pub witness: Vec<Bdd>,
}

impl SymbolicPath {
    pub fn cycle_start(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_witness(&self) -> &[Bdd] {
        &self.witness[self.prefix.len()..]
    }
}

/// Serialised form of a lasso.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathJson {
    pub initial_cube: String,
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
}

/// A single augmented state contained in the non-empty set `set`.
fn pick_state(sess: &mut AnalysisSession, set: Bdd) -> Bdd {
    let cube = sess
        .mgr
        .pick_minterm(set, &sess.aug.cur_vars)
        .expect("non-empty set");
    sess.mgr.cube(&cube).expect("variables in range")
}

/// Symbolic states along the path: `I`, then the image after each block of
/// the prefix and of one pass of the cycle (`prefix.len() + cycle.len() + 1`
/// entries).
pub fn path_states(sess: &mut AnalysisSession, path: &SymbolicPath) -> Vec<Bdd> {
    let mut out = vec![path.initial];
    let mut cur = path.initial;
    for &b in path.prefix.iter().chain(&path.cycle) {
        cur = sess.image_block(b, cur);
        assert!(
            !cur.is_false(),
            "block `{}` not enabled along the path",
            sess.aug.block_name(b)
        );
        out.push(cur);
    }
    out
}

/// Shortest block sequence from the concrete state `from` to `target`, with
/// every intermediate state in `within`. With `min_one`, at least one step is
/// taken even if `from` already lies in `target`. Returns the blocks and the
/// concrete states reached after each of them.
fn layered_path(
    sess: &mut AnalysisSession,
    from: Bdd,
    target: Bdd,
    within: Bdd,
    min_one: bool,
) -> Option<(Vec<usize>, Vec<Bdd>)> {
    if !min_one && sess.mgr.leq(from, target) {
        return Some((Vec::new(), Vec::new()));
    }
    let mut layers = vec![target];
    let mut seen = if min_one { sess.mgr.ff() } else { target };
    loop {
        let last = *layers.last().expect("non-empty");
        let pre = sess.preimage(last);
        let pre = sess.mgr.and(pre, within);
        let fresh = sess.mgr.diff(pre, seen);
        if fresh.is_false() {
            return None;
        }
        seen = sess.mgr.or(seen, fresh);
        layers.push(fresh);
        if sess.mgr.leq(from, fresh) {
            break;
        }
    }
    let mut blocks = Vec::new();
    let mut states = Vec::new();
    let mut cur = from;
    for i in (0..layers.len() - 1).rev() {
        let step = (0..sess.aug.num_blocks()).find_map(|b| {
            let img = sess.image_block(b, cur);
            let hit = sess.mgr.and(img, layers[i]);
            (!hit.is_false()).then_some((b, hit))
        });
        let (b, hit) = step.expect("layered state has a successor in the next layer");
        cur = pick_state(sess, hit);
        blocks.push(b);
        states.push(cur);
    }
    Some((blocks, states))
}

/// Directed lasso construction under global constraint `gc` and optional
/// cycle constraint `cc`. Starts from a committed initial state inside the
/// constrained fair states, and for each fairness constraint (then `cc`)
/// walks a shortest path to a state meeting it before closing the loop. When
/// the loop cannot be closed, the walk so far becomes part of the prefix and
/// the construction restarts from where it stopped.
pub fn find_counterexample(
    sess: &mut AnalysisSession,
    gc: Bdd,
    cc: Option<Bdd>,
) -> Option<SymbolicPath> {
    let cc = cc.filter(|c| !c.is_true());
    let fair = sess.fair_states_constrained(gc, cc);
    let start_time = Instant::now();
    let init = sess.initial_committed();
    let seeds = sess.mgr.and(init, fair);
    if seeds.is_false() {
        return None;
    }
    let mut constraints = sess.aug.fairness.clone();
    constraints.extend(cc);

    let s0 = pick_state(sess, seeds);
    let mut witness = vec![s0];
    let mut blocks: Vec<usize> = Vec::new();
    let mut start_idx = 0;
    let result = loop {
        let start = witness[start_idx];
        let mut seg_blocks = Vec::new();
        let mut seg_states = Vec::new();
        let mut cur = start;
        let mut walked = true;
        for &c in &constraints {
            let met = std::iter::once(start)
                .chain(seg_states.iter().copied())
                .any(|s| sess.mgr.leq(s, c));
            if met {
                continue;
            }
            let target = sess.mgr.and(fair, c);
            match layered_path(sess, cur, target, fair, false) {
                Some((bs, ss)) => {
                    cur = *ss.last().unwrap_or(&cur);
                    seg_blocks.extend(bs);
                    seg_states.extend(ss);
                }
                None => {
                    walked = false;
                    break;
                }
            }
        }
        if !walked {
            // only possible for constraints where the fixpoint over-approximates
            break None;
        }
        match layered_path(sess, cur, start, fair, true) {
            Some((bs, mut ss)) => {
                ss.pop();
                blocks.extend(seg_blocks);
                blocks.extend(bs);
                witness.extend(seg_states);
                witness.extend(ss);
                break Some(SymbolicPath {
                    initial: s0,
                    prefix: blocks[..start_idx].to_vec(),
                    cycle: blocks[start_idx..].to_vec(),
                    witness,
                });
            }
            None => {
                if seg_blocks.is_empty() {
                    // `start` lies in the fair set, so it has a fair successor
                    let succ = sess.image(start);
                    let succ = sess.mgr.and(succ, fair);
                    let (bs, ss) = layered_path(sess, start, succ, fair, true)
                        .expect("fair state has a fair successor");
                    seg_blocks.extend(bs);
                    seg_states.extend(ss);
                }
                blocks.extend(seg_blocks);
                witness.extend(seg_states);
                start_idx = witness.len() - 1;
            }
        }
    };
    sess.add_millis("counterexample", start_time);
    result
}

/// Nested depth-first search over concrete augmented states, exploring
/// successors on demand and pruning states outside `gc`. Does not consult
/// the fair-state fixpoints and supports no cycle constraint.
pub fn otf_check(sess: &mut AnalysisSession, gc: Bdd) -> Option<SymbolicPath> {
    let start_time = Instant::now();
    let mut search = Otf::new(sess, gc);
    let result = search.run();
    sess.add_millis("otf", start_time);
    result
}

/// Outer search frame: node, block that led here, `(block, successor)`
/// pairs, next index.
type Frame = (usize, Option<usize>, Vec<(usize, usize)>, usize);

struct Otf<'s> {
    sess: &'s mut AnalysisSession,
    gc: Bdd,
    constraints: Vec<Bdd>,
    /// Interned `(state, counter)` product nodes.
    nodes: Vec<(Bdd, u32)>,
    index: HashMap<(Bdd, u32), usize>,
    /// Per state: bit `i` set iff it meets constraint `i`.
    fair_bits: HashMap<Bdd, u64>,
    succ_cache: HashMap<Bdd, Vec<(usize, Bdd)>>,
}

impl<'s> Otf<'s> {
    fn new(sess: &'s mut AnalysisSession, gc: Bdd) -> Self {
        let constraints = sess.aug.fairness.clone();
        assert!(constraints.len() <= 64, "too many fairness constraints");
        Otf {
            sess,
            gc,
            constraints,
            nodes: Vec::new(),
            index: HashMap::new(),
            fair_bits: HashMap::new(),
            succ_cache: HashMap::new(),
        }
    }

    fn intern(&mut self, state: Bdd, counter: u32) -> usize {
        if let Some(&n) = self.index.get(&(state, counter)) {
            return n;
        }
        let n = self.nodes.len();
        self.nodes.push((state, counter));
        self.index.insert((state, counter), n);
        n
    }

    fn bits(&mut self, state: Bdd) -> u64 {
        if let Some(&b) = self.fair_bits.get(&state) {
            return b;
        }
        let mut b = 0;
        for (i, &c) in self.constraints.iter().enumerate() {
            if self.sess.mgr.leq(state, c) {
                b |= 1 << i;
            }
        }
        self.fair_bits.insert(state, b);
        b
    }

    fn minterms(&mut self, set: Bdd) -> Vec<Bdd> {
        let vars = self.sess.aug.cur_vars.clone();
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        let rows = self.sess.mgr.minterms(set, &sorted);
        rows.into_iter()
            .map(|row| {
                let cube = crate::bdd::Cube::new(
                    sorted
                        .iter()
                        .zip(row)
                        .map(|(&v, p)| crate::bdd::Literal::new(v, p)),
                )
                .expect("distinct variables");
                self.sess.mgr.cube(&cube).expect("in range")
            })
            .collect()
    }

    fn state_successors(&mut self, state: Bdd) -> Vec<(usize, Bdd)> {
        if let Some(s) = self.succ_cache.get(&state) {
            return s.clone();
        }
        let mut out = Vec::new();
        for b in 0..self.sess.aug.num_blocks() {
            let img = self.sess.image_block(b, state);
            let img = self.sess.mgr.and(img, self.gc);
            for t in self.minterms(img) {
                out.push((b, t));
            }
        }
        self.succ_cache.insert(state, out.clone());
        out
    }

    fn k(&self) -> u32 {
        self.constraints.len() as u32
    }

    fn accepting(&mut self, node: usize) -> bool {
        let (s, i) = self.nodes[node];
        i == self.k() - 1 && self.bits(s) >> i & 1 == 1
    }

    fn successors(&mut self, node: usize) -> Vec<(usize, usize)> {
        let (s, i) = self.nodes[node];
        let j = if self.bits(s) >> i & 1 == 1 {
            (i + 1) % self.k()
        } else {
            i
        };
        self.state_successors(s)
            .into_iter()
            .map(|(b, t)| (b, self.intern(t, j)))
            .collect()
    }

    fn run(&mut self) -> Option<SymbolicPath> {
        let init = self.sess.initial_committed();
        let init = self.sess.mgr.and(init, self.gc);
        let init = self.sess.mgr.and(init, self.sess.aug.valid);
        let roots: Vec<usize> = self
            .minterms(init)
            .into_iter()
            .map(|s| self.intern(s, 0))
            .collect();

        let mut blue: Vec<bool> = Vec::new();
        let mut red: Vec<bool> = Vec::new();
        let mut stack_pos: Vec<Option<usize>> = Vec::new();
        let grow = |v: &mut Vec<bool>, n: usize| {
            if v.len() < n {
                v.resize(n, false);
            }
        };
        for root in roots {
            grow(&mut blue, self.nodes.len());
            if blue[root] {
                continue;
            }
            let mut stack: Vec<Frame> = Vec::new();
            blue[root] = true;
            let succ = self.successors(root);
            stack_pos.resize(self.nodes.len().max(stack_pos.len()), None);
            stack_pos[root] = Some(0);
            stack.push((root, None, succ, 0));
            while let Some(frame) = stack.last_mut() {
                if frame.3 < frame.2.len() {
                    let (b, v) = frame.2[frame.3];
                    frame.3 += 1;
                    grow(&mut blue, self.nodes.len());
                    if !blue[v] {
                        blue[v] = true;
                        let succ = self.successors(v);
                        stack_pos.resize(self.nodes.len().max(stack_pos.len()), None);
                        stack_pos[v] = Some(stack.len());
                        stack.push((v, Some(b), succ, 0));
                    }
                    continue;
                }
                let u = frame.0;
                if self.accepting(u) {
                    if let Some(red_path) = self.red_search(u, &mut red, &mut stack_pos) {
                        return Some(self.lasso(&stack, &stack_pos, red_path));
                    }
                }
                stack_pos[u] = None;
                stack.pop();
            }
        }
        None
    }

    /// Search from `seed` for `seed` itself or a node on the outer stack.
    /// Returns the edges `(block, node)` of the path found.
    fn red_search(
        &mut self,
        seed: usize,
        red: &mut Vec<bool>,
        stack_pos: &mut Vec<Option<usize>>,
    ) -> Option<Vec<(usize, usize)>> {
        let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut todo = vec![seed];
        while let Some(u) = todo.pop() {
            for (b, v) in self.successors(u) {
                if red.len() < self.nodes.len() {
                    red.resize(self.nodes.len(), false);
                }
                if stack_pos.len() < self.nodes.len() {
                    stack_pos.resize(self.nodes.len(), None);
                }
                if v == seed || stack_pos[v].is_some() {
                    let mut path = vec![(b, v)];
                    let mut at = u;
                    while at != seed {
                        let (pb, pu) = parent[&at];
                        path.push((pb, at));
                        at = pu;
                    }
                    path.reverse();
                    return Some(path);
                }
                if !red[v] {
                    red[v] = true;
                    parent.insert(v, (b, u));
                    todo.push(v);
                }
            }
        }
        None
    }

    fn lasso(
        &self,
        stack: &[Frame],
        stack_pos: &[Option<usize>],
        red_path: Vec<(usize, usize)>,
    ) -> SymbolicPath {
        let target = red_path.last().expect("non-empty red path").1;
        let j = stack_pos[target].expect("red path ends on the outer stack");
        let mut blocks: Vec<usize> = stack[1..]
            .iter()
            .map(|f| f.1.expect("entered by a block"))
            .collect();
        let mut witness: Vec<Bdd> = stack.iter().map(|f| self.nodes[f.0].0).collect();
        for &(b, v) in &red_path {
            blocks.push(b);
            witness.push(self.nodes[v].0);
        }
        witness.pop();
        SymbolicPath {
            initial: witness[0],
            prefix: blocks[..j].to_vec(),
            cycle: blocks[j..].to_vec(),
            witness,
        }
    }
}

/// Base-model state (value index per variable) of a concrete augmented state.
pub fn decode_state(sess: &AnalysisSession, state: Bdd) -> Vec<usize> {
    let cube = sess
        .mgr
        .pick_minterm(state, &sess.aug.cur_vars)
        .expect("non-empty state");
    let mut assignment = vec![false; sess.mgr.num_vars() as usize];
    for l in cube.literals() {
        assignment[l.var as usize] = l.positive;
    }
    sess.aug.decode_base(&assignment).expect("valid encoding")
}

/// Base states of the witness, one per step.
pub fn witness_states(sess: &AnalysisSession, path: &SymbolicPath) -> Vec<Vec<usize>> {
    path.witness
        .iter()
        .map(|&s| decode_state(sess, s))
        .collect()
}

fn format_state(sess: &AnalysisSession, state: &[usize], sep: &str) -> String {
    let m = &sess.aug.base.model;
    state
        .iter()
        .enumerate()
        .map(|(v, &x)| format!("{}={}", m.variables[v].name, m.variables[v].domain[x]))
        .collect::<Vec<_>>()
        .join(sep)
}

pub fn block_names(sess: &AnalysisSession, blocks: &[usize]) -> Vec<String> {
    blocks
        .iter()
        .map(|&b| sess.aug.block_name(b).to_string())
        .collect()
}

pub fn path_json(sess: &AnalysisSession, path: &SymbolicPath) -> PathJson {
    PathJson {
        initial_cube: format_state(sess, &decode_state(sess, path.initial), " & "),
        prefix: block_names(sess, &path.prefix),
        cycle: block_names(sess, &path.cycle),
    }
}

/// Human-readable trace: the initial assignment, then the block taken and
/// the variables it changed at every step.
pub fn trace(sess: &AnalysisSession, path: &SymbolicPath) -> String {
    let m = &sess.aug.base.model;
    let states = witness_states(sess, path);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "state 0{}",
        if path.cycle_start() == 0 {
            " (cycle start)"
        } else {
            ""
        }
    );
    for (v, &x) in states[0].iter().enumerate() {
        let _ = writeln!(
            out,
            "  {} = {}",
            m.variables[v].name, m.variables[v].domain[x]
        );
    }
    let blocks: Vec<usize> = path.prefix.iter().chain(&path.cycle).copied().collect();
    for (i, &b) in blocks.iter().enumerate() {
        let from = &states[i];
        let (to, label) = if i + 1 < states.len() {
            let mark = if i + 1 == path.cycle_start() {
                " (cycle start)"
            } else {
                ""
            };
            (&states[i + 1], format!("state {}{mark}", i + 1))
        } else {
            (
                &states[path.cycle_start()],
                format!("back to state {}", path.cycle_start()),
            )
        };
        let _ = writeln!(out, "-- {} -->", sess.aug.block_name(b));
        let _ = writeln!(out, "{label}");
        for (v, (&x, &y)) in from.iter().zip(to).enumerate() {
            if x != y {
                let _ = writeln!(
                    out,
                    "  {} = {}",
                    m.variables[v].name, m.variables[v].domain[y]
                );
            }
        }
    }
    out
}
