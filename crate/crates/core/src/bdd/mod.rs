//! Reduced ordered binary decision diagrams.
//!
//! A [`BddManager`] owns a node table with a unique table for hash-consing and
//! per-operation memo caches. Diagrams are referred to by [`Bdd`] handles,
//! which are only meaningful for the manager that produced them. Edges are
//! complement-free and the variable order is the variable index order, so a
//! node's level is its variable index.
//!
//! Canonicity holds within a manager: two handles are equal iff they denote the
//! same Boolean function.

mod cube;
mod isop;

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU32, Ordering};

use rustc_hash::FxHashMap;
use thiserror::Error;

pub use cube::{Cube, Literal};

/// Index of a Boolean BDD variable. Lower indices sit closer to the root.
pub type Var = u32;

type NodeId = u32;

const FALSE: NodeId = 0;
const TRUE: NodeId = 1;
const TERMINAL_LEVEL: Var = Var::MAX;

/// Once the memo caches together hold this many entries they are flushed.
const CACHE_LIMIT: usize = 1 << 22;

static NEXT_TABLE: AtomicU32 = AtomicU32::new(1);

/// Handle to a diagram stored in a [`BddManager`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bdd {
    node: NodeId,
    table: u32,
}

impl Bdd {
    pub fn is_false(self) -> bool {
        self.node == FALSE
    }

    pub fn is_true(self) -> bool {
        self.node == TRUE
    }

    pub fn is_const(self) -> bool {
        self.node <= TRUE
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BddError {
    #[error("variable index {index} out of range (manager has {count} variables)")]
    VarOutOfRange { index: Var, count: u32 },
    #[error("diagram belongs to a different node table")]
    TableMismatch,
    #[error("rename of variable {from} to {to} breaks the variable order")]
    RenameOrder { from: Var, to: Var },
    #[error("rename map sends two variables to {0}")]
    RenameNotInjective(Var),
    #[error("cannot pick a cube from the empty diagram")]
    Empty,
    #[error("inconsistent cube: variable {0} appears with both polarities")]
    InconsistentCube(Var),
}

/// Binary Boolean connectives accepted by [`BddManager::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Implies,
}

/// A set of variables, stored as the positive cube over them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet {
    cube: Bdd,
    vars: Vec<Var>,
}

impl VarSet {
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn as_bdd(&self) -> Bdd {
        self.cube
    }
}

/// A variable substitution registered with a manager.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenameMap {
    id: usize,
    table: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Node {
    var: Var,
    lo: NodeId,
    hi: NodeId,
}

#[derive(Default)]
struct Caches {
    and: FxHashMap<(NodeId, NodeId), NodeId>,
    or: FxHashMap<(NodeId, NodeId), NodeId>,
    xor: FxHashMap<(NodeId, NodeId), NodeId>,
    not: FxHashMap<NodeId, NodeId>,
    ite: FxHashMap<(NodeId, NodeId, NodeId), NodeId>,
    exists: FxHashMap<(NodeId, NodeId), NodeId>,
    relprod: FxHashMap<(NodeId, NodeId, NodeId), NodeId>,
    rename: FxHashMap<(NodeId, usize), NodeId>,
}

impl Caches {
    fn len(&self) -> usize {
        self.and.len()
            + self.or.len()
            + self.xor.len()
            + self.not.len()
            + self.ite.len()
            + self.exists.len()
            + self.relprod.len()
            + self.rename.len()
    }

    fn clear(&mut self) {
        *self = Caches::default();
    }
}

/// Node table, unique table and operation caches for one analysis session.
pub struct BddManager {
    table: u32,
    num_vars: u32,
    nodes: Vec<Node>,
    unique: FxHashMap<Node, NodeId>,
    caches: Caches,
    renames: Vec<Vec<Var>>,
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new(0)
    }
}

impl std::fmt::Debug for BddManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BddManager")
            .field("table", &self.table)
            .field("num_vars", &self.num_vars)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl BddManager {
    pub fn new(num_vars: u32) -> Self {
        let terminal = |v| Node {
            var: TERMINAL_LEVEL,
            lo: v,
            hi: v,
        };
        BddManager {
            table: NEXT_TABLE.fetch_add(1, Ordering::Relaxed),
            num_vars,
            nodes: vec![terminal(FALSE), terminal(TRUE)],
            unique: FxHashMap::default(),
            caches: Caches::default(),
            renames: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Extends the variable range by `n` fresh variables placed below all
    /// existing ones; returns the index of the first new variable.
    pub fn add_vars(&mut self, n: u32) -> Var {
        let first = self.num_vars;
        self.num_vars += n;
        for map in &mut self.renames {
            map.extend(first..self.num_vars);
        }
        first
    }

    /// Total number of nodes allocated so far, terminals included.
    pub fn allocated_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn wrap(&self, node: NodeId) -> Bdd {
        Bdd {
            node,
            table: self.table,
        }
    }

    fn id(&self, f: Bdd) -> NodeId {
        assert_eq!(
            f.table, self.table,
            "BDD handle used with a manager that did not create it"
        );
        f.node
    }

    pub fn check(&self, f: Bdd) -> Result<(), BddError> {
        if f.table == self.table {
            Ok(())
        } else {
            Err(BddError::TableMismatch)
        }
    }

    fn maybe_flush(&mut self) {
        if self.caches.len() > CACHE_LIMIT {
            self.caches.clear();
        }
    }

    #[inline]
    fn level(&self, n: NodeId) -> Var {
        self.nodes[n as usize].var
    }

    fn mk(&mut self, var: Var, lo: NodeId, hi: NodeId) -> NodeId {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    #[inline]
    fn cofactors(&self, n: NodeId, var: Var) -> (NodeId, NodeId) {
        let node = self.nodes[n as usize];
        if node.var == var {
            (node.lo, node.hi)
        } else {
            (n, n)
        }
    }

    // ----- constructors ---------------------------------------------------

    pub fn constant(&self, value: bool) -> Bdd {
        self.wrap(if value { TRUE } else { FALSE })
    }

    pub fn ff(&self) -> Bdd {
        self.constant(false)
    }

    pub fn tt(&self) -> Bdd {
        self.constant(true)
    }

    /// The single-variable diagram for `var`.
    pub fn var(&mut self, var: Var) -> Result<Bdd, BddError> {
        self.literal(var, true)
    }

    pub fn literal(&mut self, var: Var, positive: bool) -> Result<Bdd, BddError> {
        if var >= self.num_vars {
            return Err(BddError::VarOutOfRange {
                index: var,
                count: self.num_vars,
            });
        }
        let n = if positive {
            self.mk(var, FALSE, TRUE)
        } else {
            self.mk(var, TRUE, FALSE)
        };
        Ok(self.wrap(n))
    }

    /// Conjunction of the literals of `cube`.
    pub fn cube(&mut self, cube: &Cube) -> Result<Bdd, BddError> {
        let mut acc = TRUE;
        for lit in cube.literals().iter().rev() {
            if lit.var >= self.num_vars {
                return Err(BddError::VarOutOfRange {
                    index: lit.var,
                    count: self.num_vars,
                });
            }
            acc = if lit.positive {
                self.mk(lit.var, FALSE, acc)
            } else {
                self.mk(lit.var, acc, FALSE)
            };
        }
        Ok(self.wrap(acc))
    }

    pub fn var_set(&mut self, vars: &[Var]) -> Result<VarSet, BddError> {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        let cube = Cube::new(vars.iter().map(|&v| Literal::new(v, true)))?;
        Ok(VarSet {
            cube: self.cube(&cube)?,
            vars,
        })
    }

    /// Registers a substitution `from -> to`; variables not mentioned are left
    /// in place.
    pub fn rename_map(&mut self, pairs: &[(Var, Var)]) -> Result<RenameMap, BddError> {
        let mut map: Vec<Var> = (0..self.num_vars).collect();
        let mut seen = rustc_hash::FxHashSet::default();
        for &(from, to) in pairs {
            for v in [from, to] {
                if v >= self.num_vars {
                    return Err(BddError::VarOutOfRange {
                        index: v,
                        count: self.num_vars,
                    });
                }
            }
            if !seen.insert(to) {
                return Err(BddError::RenameNotInjective(to));
            }
            map[from as usize] = to;
        }
        self.renames.push(map);
        Ok(RenameMap {
            id: self.renames.len() - 1,
            table: self.table,
        })
    }

    // ----- connectives ----------------------------------------------------

    pub fn not(&mut self, f: Bdd) -> Bdd {
        let f = self.id(f);
        self.maybe_flush();
        let r = self.not_rec(f);
        self.wrap(r)
    }

    fn not_rec(&mut self, f: NodeId) -> NodeId {
        match f {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if let Some(&r) = self.caches.not.get(&f) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[f as usize];
        let l = self.not_rec(lo);
        let h = self.not_rec(hi);
        let r = self.mk(var, l, h);
        self.caches.not.insert(f, r);
        r
    }

    pub fn and(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.id(a), self.id(b));
        self.maybe_flush();
        let r = self.and_rec(a, b);
        self.wrap(r)
    }

    fn and_rec(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == FALSE || b == FALSE {
            return FALSE;
        }
        if a == TRUE || a == b {
            return b;
        }
        if b == TRUE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&r) = self.caches.and.get(&key) {
            return r;
        }
        let v = self.level(a).min(self.level(b));
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let lo = self.and_rec(a0, b0);
        let hi = self.and_rec(a1, b1);
        let r = self.mk(v, lo, hi);
        self.caches.and.insert(key, r);
        r
    }

    pub fn or(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.id(a), self.id(b));
        self.maybe_flush();
        let r = self.or_rec(a, b);
        self.wrap(r)
    }

    fn or_rec(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == TRUE || b == TRUE {
            return TRUE;
        }
        if a == FALSE || a == b {
            return b;
        }
        if b == FALSE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&r) = self.caches.or.get(&key) {
            return r;
        }
        let v = self.level(a).min(self.level(b));
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let lo = self.or_rec(a0, b0);
        let hi = self.or_rec(a1, b1);
        let r = self.mk(v, lo, hi);
        self.caches.or.insert(key, r);
        r
    }

    pub fn xor(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.id(a), self.id(b));
        self.maybe_flush();
        let r = self.xor_rec(a, b);
        self.wrap(r)
    }

    fn xor_rec(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == b {
            return FALSE;
        }
        if a == FALSE {
            return b;
        }
        if b == FALSE {
            return a;
        }
        if a == TRUE {
            return self.not_rec(b);
        }
        if b == TRUE {
            return self.not_rec(a);
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&r) = self.caches.xor.get(&key) {
            return r;
        }
        let v = self.level(a).min(self.level(b));
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let lo = self.xor_rec(a0, b0);
        let hi = self.xor_rec(a1, b1);
        let r = self.mk(v, lo, hi);
        self.caches.xor.insert(key, r);
        r
    }

    pub fn implies(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let na = self.not(a);
        self.or(na, b)
    }

    pub fn iff(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let x = self.xor(a, b);
        self.not(x)
    }

    /// `a ∧ ¬b`
    pub fn diff(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let nb = self.not(b);
        self.and(a, nb)
    }

    pub fn apply(&mut self, op: BoolOp, a: Bdd, b: Bdd) -> Bdd {
        match op {
            BoolOp::And => self.and(a, b),
            BoolOp::Or => self.or(a, b),
            BoolOp::Xor => self.xor(a, b),
            BoolOp::Implies => self.implies(a, b),
        }
    }

    /// Like [`apply`](Self::apply) but reports foreign handles instead of
    /// panicking.
    pub fn try_apply(&mut self, op: BoolOp, a: Bdd, b: Bdd) -> Result<Bdd, BddError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.apply(op, a, b))
    }

    pub fn and_all<I: IntoIterator<Item = Bdd>>(&mut self, items: I) -> Bdd {
        let mut acc = self.tt();
        for f in items {
            acc = self.and(acc, f);
            if acc.is_false() {
                break;
            }
        }
        acc
    }

    pub fn or_all<I: IntoIterator<Item = Bdd>>(&mut self, items: I) -> Bdd {
        let mut acc = self.ff();
        for f in items {
            acc = self.or(acc, f);
            if acc.is_true() {
                break;
            }
        }
        acc
    }

    pub fn ite(&mut self, c: Bdd, t: Bdd, e: Bdd) -> Bdd {
        let (c, t, e) = (self.id(c), self.id(t), self.id(e));
        self.maybe_flush();
        let r = self.ite_rec(c, t, e);
        self.wrap(r)
    }

    fn ite_rec(&mut self, c: NodeId, t: NodeId, e: NodeId) -> NodeId {
        if c == TRUE || t == e {
            return t;
        }
        if c == FALSE {
            return e;
        }
        if t == TRUE && e == FALSE {
            return c;
        }
        if t == FALSE && e == TRUE {
            return self.not_rec(c);
        }
        if let Some(&r) = self.caches.ite.get(&(c, t, e)) {
            return r;
        }
        let v = self.level(c).min(self.level(t)).min(self.level(e));
        let (c0, c1) = self.cofactors(c, v);
        let (t0, t1) = self.cofactors(t, v);
        let (e0, e1) = self.cofactors(e, v);
        let lo = self.ite_rec(c0, t0, e0);
        let hi = self.ite_rec(c1, t1, e1);
        let r = self.mk(v, lo, hi);
        self.caches.ite.insert((c, t, e), r);
        r
    }

    /// Cofactor of `f` with `var` fixed to `value`.
    pub fn restrict(&mut self, f: Bdd, var: Var, value: bool) -> Bdd {
        let f = self.id(f);
        let mut memo = FxHashMap::default();
        let r = self.restrict_rec(f, var, value, &mut memo);
        self.wrap(r)
    }

    fn restrict_rec(
        &mut self,
        f: NodeId,
        var: Var,
        value: bool,
        memo: &mut FxHashMap<NodeId, NodeId>,
    ) -> NodeId {
        let node = self.nodes[f as usize];
        if node.var > var {
            return f;
        }
        if node.var == var {
            return if value { node.hi } else { node.lo };
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.restrict_rec(node.lo, var, value, memo);
        let hi = self.restrict_rec(node.hi, var, value, memo);
        let r = self.mk(node.var, lo, hi);
        memo.insert(f, r);
        r
    }

    // ----- quantification and substitution --------------------------------

    pub fn exists(&mut self, vars: &VarSet, f: Bdd) -> Bdd {
        let f = self.id(f);
        let c = self.id(vars.cube);
        self.maybe_flush();
        let r = self.exists_rec(f, c);
        self.wrap(r)
    }

    pub fn forall(&mut self, vars: &VarSet, f: Bdd) -> Bdd {
        let nf = self.not(f);
        let e = self.exists(vars, nf);
        self.not(e)
    }

    fn exists_rec(&mut self, f: NodeId, mut cube: NodeId) -> NodeId {
        if f <= TRUE {
            return f;
        }
        let top = self.level(f);
        while cube != TRUE && self.level(cube) < top {
            cube = self.nodes[cube as usize].hi;
        }
        if cube == TRUE {
            return f;
        }
        if let Some(&r) = self.caches.exists.get(&(f, cube)) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[f as usize];
        let r = if self.level(cube) == var {
            let rest = self.nodes[cube as usize].hi;
            let l = self.exists_rec(lo, rest);
            if l == TRUE {
                TRUE
            } else {
                let h = self.exists_rec(hi, rest);
                self.or_rec(l, h)
            }
        } else {
            let l = self.exists_rec(lo, cube);
            let h = self.exists_rec(hi, cube);
            self.mk(var, l, h)
        };
        self.caches.exists.insert((f, cube), r);
        r
    }

    /// Relational product `∃vars. a ∧ b` without building the conjunction.
    pub fn and_exists(&mut self, a: Bdd, b: Bdd, vars: &VarSet) -> Bdd {
        let (a, b) = (self.id(a), self.id(b));
        let c = self.id(vars.cube);
        self.maybe_flush();
        let r = self.relprod_rec(a, b, c);
        self.wrap(r)
    }

    fn relprod_rec(&mut self, a: NodeId, b: NodeId, mut cube: NodeId) -> NodeId {
        if a == FALSE || b == FALSE {
            return FALSE;
        }
        if a == TRUE && b == TRUE {
            return TRUE;
        }
        if cube == TRUE {
            return self.and_rec(a, b);
        }
        if a == TRUE || a == b {
            return self.exists_rec(b, cube);
        }
        if b == TRUE {
            return self.exists_rec(a, cube);
        }
        let top = self.level(a).min(self.level(b));
        while cube != TRUE && self.level(cube) < top {
            cube = self.nodes[cube as usize].hi;
        }
        if cube == TRUE {
            return self.and_rec(a, b);
        }
        let key = if a < b { (a, b, cube) } else { (b, a, cube) };
        if let Some(&r) = self.caches.relprod.get(&key) {
            return r;
        }
        let (a0, a1) = self.cofactors(a, top);
        let (b0, b1) = self.cofactors(b, top);
        let r = if self.level(cube) == top {
            let rest = self.nodes[cube as usize].hi;
            let l = self.relprod_rec(a0, b0, rest);
            if l == TRUE {
                TRUE
            } else {
                let h = self.relprod_rec(a1, b1, rest);
                self.or_rec(l, h)
            }
        } else {
            let l = self.relprod_rec(a0, b0, cube);
            let h = self.relprod_rec(a1, b1, cube);
            self.mk(top, l, h)
        };
        self.caches.relprod.insert(key, r);
        r
    }

    /// Substitutes variables according to `map`. Fails if the substitution
    /// would put a variable above one it must follow in this diagram.
    pub fn rename(&mut self, f: Bdd, map: &RenameMap) -> Result<Bdd, BddError> {
        self.check(f)?;
        if map.table != self.table {
            return Err(BddError::TableMismatch);
        }
        self.maybe_flush();
        let r = self.rename_rec(f.node, map.id)?;
        Ok(self.wrap(r))
    }

    fn rename_rec(&mut self, f: NodeId, map: usize) -> Result<NodeId, BddError> {
        if f <= TRUE {
            return Ok(f);
        }
        if let Some(&r) = self.caches.rename.get(&(f, map)) {
            return Ok(r);
        }
        let Node { var, lo, hi } = self.nodes[f as usize];
        let l = self.rename_rec(lo, map)?;
        let h = self.rename_rec(hi, map)?;
        let to = self.renames[map][var as usize];
        if self.level(l) <= to || self.level(h) <= to {
            return Err(BddError::RenameOrder { from: var, to });
        }
        let r = self.mk(to, l, h);
        self.caches.rename.insert((f, map), r);
        Ok(r)
    }

    // ----- queries ----------------------------------------------------------

    /// `a ⟹ b` holds for every assignment.
    pub fn leq(&mut self, a: Bdd, b: Bdd) -> bool {
        let d = self.diff(a, b);
        d.is_false()
    }

    pub fn intersects(&mut self, a: Bdd, b: Bdd) -> bool {
        !self.and(a, b).is_false()
    }

    /// Evaluates `f` under `assignment`, indexed by variable.
    pub fn eval(&self, f: Bdd, assignment: &[bool]) -> bool {
        let mut n = self.id(f);
        while n > TRUE {
            let node = self.nodes[n as usize];
            n = if assignment[node.var as usize] {
                node.hi
            } else {
                node.lo
            };
        }
        n == TRUE
    }

    pub fn top_var(&self, f: Bdd) -> Option<Var> {
        let n = self.id(f);
        (n > TRUE).then(|| self.level(n))
    }

    /// Variables `f` depends on, ascending.
    pub fn support(&self, f: Bdd) -> Vec<Var> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut vars = rustc_hash::FxHashSet::default();
        let mut stack = vec![self.id(f)];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.nodes[n as usize];
            vars.insert(node.var);
            stack.push(node.lo);
            stack.push(node.hi);
        }
        let mut out: Vec<Var> = vars.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Number of decision nodes reachable from `f`.
    pub fn node_count(&self, f: Bdd) -> usize {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![self.id(f)];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.nodes[n as usize];
            stack.push(node.lo);
            stack.push(node.hi);
        }
        seen.len()
    }

    /// Number of assignments to `vars` satisfying `f`. `vars` must cover the
    /// support of `f`.
    pub fn sat_count(&self, f: Bdd, vars: &[Var]) -> u128 {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        assert!(vars.len() < 128, "sat_count limited to 127 variables");
        let mut memo = FxHashMap::default();
        self.count_rec(self.id(f), 0, &vars, &mut memo)
    }

    fn count_rec(
        &self,
        n: NodeId,
        pos: usize,
        vars: &[Var],
        memo: &mut FxHashMap<(NodeId, usize), u128>,
    ) -> u128 {
        if n == FALSE {
            return 0;
        }
        if pos == vars.len() {
            assert!(n == TRUE, "sat_count: support not covered by vars");
            return 1;
        }
        if let Some(&c) = memo.get(&(n, pos)) {
            return c;
        }
        let v = vars[pos];
        let node = self.nodes[n as usize];
        assert!(node.var >= v, "sat_count: variable {} not listed", node.var);
        let c = if node.var == v {
            self.count_rec(node.lo, pos + 1, vars, memo)
                + self.count_rec(node.hi, pos + 1, vars, memo)
        } else {
            2 * self.count_rec(n, pos + 1, vars, memo)
        };
        memo.insert((n, pos), c);
        c
    }

    /// All satisfying assignments of `f` over `vars` (ascending order of
    /// `vars`), enumerated with `false` before `true`.
    pub fn minterms(&self, f: Bdd, vars: &[Var]) -> Vec<Vec<bool>> {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(vars.len());
        self.minterms_rec(self.id(f), 0, &vars, &mut current, &mut out);
        out
    }

    fn minterms_rec(
        &self,
        n: NodeId,
        pos: usize,
        vars: &[Var],
        current: &mut Vec<bool>,
        out: &mut Vec<Vec<bool>>,
    ) {
        if n == FALSE {
            return;
        }
        if pos == vars.len() {
            assert!(n == TRUE, "minterms: support not covered by vars");
            out.push(current.clone());
            return;
        }
        let v = vars[pos];
        let (lo, hi) = self.cofactors(n, v);
        current.push(false);
        self.minterms_rec(lo, pos + 1, vars, current, out);
        current.pop();
        current.push(true);
        self.minterms_rec(hi, pos + 1, vars, current, out);
        current.pop();
    }

    /// The least satisfying path: the low branch is taken whenever it does not
    /// lead straight to `false`.
    pub fn pick_cube(&self, f: Bdd) -> Result<Cube, BddError> {
        let mut n = self.id(f);
        if n == FALSE {
            return Err(BddError::Empty);
        }
        let mut lits = Vec::new();
        while n > TRUE {
            let node = self.nodes[n as usize];
            if node.lo != FALSE {
                lits.push(Literal::new(node.var, false));
                n = node.lo;
            } else {
                lits.push(Literal::new(node.var, true));
                n = node.hi;
            }
        }
        Cube::new(lits)
    }

    /// Like [`pick_cube`](Self::pick_cube), then completes every variable of
    /// `vars` the cube leaves open with `false`. The result is a single
    /// assignment over `vars` contained in `f` (when `vars` covers the
    /// support of `f`).
    pub fn pick_minterm(&self, f: Bdd, vars: &[Var]) -> Result<Cube, BddError> {
        let cube = self.pick_cube(f)?;
        let mut lits: Vec<Literal> = cube.literals().to_vec();
        for &v in vars {
            if cube.polarity(v).is_none() {
                lits.push(Literal::new(v, false));
            }
        }
        Cube::new(lits)
    }

    /// Graphviz rendering of `f`; `name` labels decision variables.
    pub fn to_dot(&self, f: Bdd, name: &dyn Fn(Var) -> String) -> String {
        let root = self.id(f);
        let mut out = String::from(
            "digraph bdd {\n  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n",
        );
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![root];
        let mut order = Vec::new();
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            order.push(n);
            let node = self.nodes[n as usize];
            stack.push(node.hi);
            stack.push(node.lo);
        }
        order.sort_unstable();
        for n in order {
            let node = self.nodes[n as usize];
            let _ = writeln!(out, "  n{n} [shape=circle,label=\"{}\"];", name(node.var));
            let _ = writeln!(out, "  n{n} -> n{} [style=dashed];", node.lo);
            let _ = writeln!(out, "  n{n} -> n{};", node.hi);
        }
        let _ = writeln!(
            out,
            "  root [shape=plaintext,label=\"\"];\n  root -> n{root};"
        );
        out.push_str("}\n");
        out
    }
}
