//! Binary encoding of model variables and per-block transition relations.

use thiserror::Error;

use crate::bdd::{Bdd, BddManager, Var};
use crate::model::{Expr, Model, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("variable order names unknown variable `{0}`")]
    Unknown(String),
    #[error("variable order lists `{0}` twice")]
    Duplicate(String),
    #[error("variable order omits `{0}`")]
    Missing(String),
}

/// Placement of model variables in the BDD order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum VarOrder {
    #[default]
    Declaration,
    /// Variable names from top to bottom; must list every variable once.
    Custom(Vec<String>),
}

impl VarOrder {
    /// Reads an order file: variable names separated by whitespace or commas,
    /// `#` starts a comment.
    pub fn from_text(text: &str) -> VarOrder {
        let names = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        VarOrder::Custom(names)
    }
}

/// Boolean BDD variables of one model variable, most significant bit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarBits {
    pub cur: Vec<Var>,
    pub next: Vec<Var>,
}

/// Bit assignment for every model variable. Current and next copies of a bit
/// are adjacent (`cur = 2k`, `next = 2k + 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableMap {
    bits: Vec<VarBits>,
    sizes: Vec<usize>,
    num_bdd_vars: u32,
}

pub fn bits_for(domain_size: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < domain_size {
        bits += 1;
    }
    bits
}

/// Assigns BDD variables to the variables of `m` following `order`.
pub fn encode(m: &Model, order: &VarOrder) -> Result<VariableMap, OrderError> {
    let sequence: Vec<VarId> = match order {
        VarOrder::Declaration => (0..m.variables.len()).collect(),
        VarOrder::Custom(names) => {
            let mut seq = Vec::with_capacity(names.len());
            for n in names {
                let v = m.var_id(n).ok_or_else(|| OrderError::Unknown(n.clone()))?;
                if seq.contains(&v) {
                    return Err(OrderError::Duplicate(n.clone()));
                }
                seq.push(v);
            }
            if let Some(v) = (0..m.variables.len()).find(|v| !seq.contains(v)) {
                return Err(OrderError::Missing(m.variables[v].name.clone()));
            }
            seq
        }
    };
    let mut bits = vec![
        VarBits {
            cur: Vec::new(),
            next: Vec::new()
        };
        m.variables.len()
    ];
    let mut k: u32 = 0;
    for v in sequence {
        for _ in 0..bits_for(m.variables[v].domain.len()) {
            bits[v].cur.push(2 * k);
            bits[v].next.push(2 * k + 1);
            k += 1;
        }
    }
    Ok(VariableMap {
        bits,
        sizes: m.variables.iter().map(|v| v.domain.len()).collect(),
        num_bdd_vars: 2 * k,
    })
}

impl VariableMap {
    pub fn num_bdd_vars(&self) -> u32 {
        self.num_bdd_vars
    }

    pub fn bits(&self, v: VarId) -> &VarBits {
        &self.bits[v]
    }

    pub fn num_model_vars(&self) -> usize {
        self.bits.len()
    }

    pub fn cur_vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .bits
            .iter()
            .flat_map(|b| b.cur.iter().copied())
            .collect();
        vs.sort_unstable();
        vs
    }

    pub fn next_vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .bits
            .iter()
            .flat_map(|b| b.next.iter().copied())
            .collect();
        vs.sort_unstable();
        vs
    }

    fn slots(&self, v: VarId, next: bool) -> &[Var] {
        if next {
            &self.bits[v].next
        } else {
            &self.bits[v].cur
        }
    }

    /// `v = x` over the current (or next) copy.
    pub fn value(&self, mgr: &mut BddManager, v: VarId, x: usize, next: bool) -> Bdd {
        assert!(x < self.sizes[v], "value index out of range");
        let slots = self.slots(v, next);
        let n = slots.len();
        let mut acc = mgr.tt();
        for (j, &bit) in slots.iter().enumerate().rev() {
            let lit = mgr
                .literal(bit, x >> (n - 1 - j) & 1 == 1)
                .expect("encoded bit within manager range");
            acc = mgr.and(lit, acc);
        }
        acc
    }

    /// Excludes bit patterns that do not encode a domain value.
    pub fn valid(&self, mgr: &mut BddManager, next: bool) -> Bdd {
        let mut acc = mgr.tt();
        for v in 0..self.bits.len() {
            let k = self.sizes[v];
            if k == 1usize << self.bits[v].cur.len() {
                continue;
            }
            let mut ok = mgr.ff();
            for x in 0..k {
                let b = self.value(mgr, v, x, next);
                ok = mgr.or(ok, b);
            }
            acc = mgr.and(acc, ok);
        }
        acc
    }

    pub fn expr(&self, mgr: &mut BddManager, e: &Expr, next: bool) -> Bdd {
        match e {
            Expr::Const(b) => mgr.constant(*b),
            Expr::Eq(v, x) => self.value(mgr, *v, *x, next),
            Expr::Not(a) => {
                let a = self.expr(mgr, a, next);
                mgr.not(a)
            }
            Expr::And(a, b) => {
                let a = self.expr(mgr, a, next);
                let b = self.expr(mgr, b, next);
                mgr.and(a, b)
            }
            Expr::Or(a, b) => {
                let a = self.expr(mgr, a, next);
                let b = self.expr(mgr, b, next);
                mgr.or(a, b)
            }
        }
    }

    /// The single state `state` (one value index per model variable).
    pub fn state(&self, mgr: &mut BddManager, state: &[usize], next: bool) -> Bdd {
        let mut acc = mgr.tt();
        for (v, &x) in state.iter().enumerate().rev() {
            let b = self.value(mgr, v, x, next);
            acc = mgr.and(b, acc);
        }
        acc
    }

    /// Reads the value of every model variable from a full assignment indexed
    /// by BDD variable. Invalid patterns decode to `None`.
    pub fn decode(&self, assignment: &[bool]) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.bits.len());
        for (v, b) in self.bits.iter().enumerate() {
            let x = b.cur.iter().fold(0usize, |acc, &bit| {
                (acc << 1) | assignment[bit as usize] as usize
            });
            if x >= self.sizes[v] {
                return None;
            }
            out.push(x);
        }
        Some(out)
    }

    /// Writes `state` into the current-state slots of `assignment`.
    pub fn write_state(&self, state: &[usize], assignment: &mut [bool]) {
        for (v, b) in self.bits.iter().enumerate() {
            let n = b.cur.len();
            for (j, &bit) in b.cur.iter().enumerate() {
                assignment[bit as usize] = state[v] >> (n - 1 - j) & 1 == 1;
            }
        }
    }
}

/// A completed model with its encoding and symbolic relations.
#[derive(Clone, Debug)]
pub struct EncodedModel {
    pub model: Model,
    pub map: VariableMap,
    /// Domain constraint on current-state bits.
    pub valid: Bdd,
    pub init: Bdd,
    /// One relation per block, in block order.
    pub relations: Vec<Bdd>,
}

impl EncodedModel {
    /// Completes `model`, encodes it and builds its relations in a manager
    /// sized for the base variables; more variables may be added later.
    pub fn new(model: &Model, order: &VarOrder) -> Result<(BddManager, EncodedModel), OrderError> {
        let model = model.complete();
        let map = encode(&model, order)?;
        let mut mgr = BddManager::new(map.num_bdd_vars());
        let valid = map.valid(&mut mgr, false);
        let init = map.state(&mut mgr, &model.initial_state(), false);
        let relations = block_relations(&mut mgr, &model, &map);
        let em = EncodedModel {
            model,
            map,
            valid,
            init,
            relations,
        };
        Ok((mgr, em))
    }
}

/// Relation of each block: valid current state, guard, assigned values in
/// the next state and every other variable unchanged.
pub fn block_relations(mgr: &mut BddManager, m: &Model, map: &VariableMap) -> Vec<Bdd> {
    let valid = map.valid(mgr, false);
    m.blocks
        .iter()
        .map(|b| {
            let mut rel = map.expr(mgr, &b.guard, false);
            rel = mgr.and(valid, rel);
            for v in (0..m.variables.len()).rev() {
                let part = match b.assigns(v) {
                    Some(x) => map.value(mgr, v, x, true),
                    None => {
                        let bits = map.bits(v).clone();
                        let mut eq = mgr.tt();
                        for (&c, &n) in bits.cur.iter().zip(&bits.next).rev() {
                            let c = mgr.var(c).expect("in range");
                            let n = mgr.var(n).expect("in range");
                            let same = mgr.iff(c, n);
                            eq = mgr.and(same, eq);
                        }
                        eq
                    }
                };
                rel = mgr.and(rel, part);
            }
            rel
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;
    use crate::random::{random_model, RandomModelConfig};

    fn all_states(sizes: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &k in sizes {
            out = out
                .into_iter()
                .flat_map(|s| {
                    (0..k).map(move |x| {
                        let mut t = s.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn bit_widths() {
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(4), 2);
        assert_eq!(bits_for(5), 3);
        let m = parse_model("var X : {a, b, c} init a; event F;").unwrap();
        let map = encode(&m, &VarOrder::Declaration).unwrap();
        assert_eq!(map.bits(0).cur, vec![0, 2]);
        assert_eq!(map.bits(0).next, vec![1, 3]);
        assert_eq!(map.bits(1).cur, vec![4]);
        let mut mgr = BddManager::new(map.num_bdd_vars());
        let valid = map.valid(&mut mgr, false);
        // one of four patterns of X excluded
        assert_eq!(mgr.sat_count(valid, &map.cur_vars()), 6);
    }

    #[test]
    fn custom_order() {
        let m = parse_model("var X : {a, b} init a; var Y : {a, b} init a;").unwrap();
        let order = VarOrder::from_text("Y, X # comment");
        let map = encode(&m, &order).unwrap();
        assert_eq!(map.bits(1).cur, vec![0]);
        assert_eq!(map.bits(0).cur, vec![2]);
        assert_eq!(
            encode(&m, &VarOrder::from_text("Y")),
            Err(OrderError::Missing("X".into()))
        );
        assert_eq!(
            encode(&m, &VarOrder::from_text("Y Z")),
            Err(OrderError::Unknown("Z".into()))
        );
    }

    #[test]
    fn simple_relation() {
        let m = parse_model("var X:{a,b} init a; block t {guard X=a; X:=b;}").unwrap();
        let (mut mgr, em) = EncodedModel::new(&m, &VarOrder::Declaration).unwrap();
        let a = em.map.value(&mut mgr, 0, 0, false);
        let b_next = em.map.value(&mut mgr, 0, 1, true);
        let expected = mgr.and(a, b_next);
        assert_eq!(em.relations[0], expected);
    }

    #[test]
    fn relations_match_explicit_successors() {
        let cfg = RandomModelConfig {
            vars: 3,
            max_domain: 3,
            flags: 2,
            blocks: 4,
        };
        for seed in 0..25 {
            let (mut mgr, em) =
                EncodedModel::new(&random_model(&cfg, seed), &VarOrder::Declaration).unwrap();
            let sizes: Vec<usize> = em.model.variables.iter().map(|v| v.domain.len()).collect();
            let states = all_states(&sizes);
            let n = mgr.num_vars() as usize;
            for (bi, block) in em.model.blocks.iter().enumerate() {
                let rel = em.relations[bi];
                for s in &states {
                    for t in &states {
                        let mut asg = vec![false; n];
                        em.map.write_state(s, &mut asg);
                        for (v, b) in (0..sizes.len()).map(|v| (v, em.map.bits(v))) {
                            let k = b.next.len();
                            for (j, &bit) in b.next.iter().enumerate() {
                                asg[bit as usize] = t[v] >> (k - 1 - j) & 1 == 1;
                            }
                        }
                        let expected = block.enabled(s) && block.apply(s) == *t;
                        assert_eq!(mgr.eval(rel, &asg), expected, "seed {seed} block {bi}");
                    }
                }
            }
            // flags never reset and every block is deterministic
            for &f in &em.model.events() {
                let fc = em.map.value(&mut mgr, f, 1, false);
                let fn_ = em.map.value(&mut mgr, f, 1, true);
                let mono = mgr.implies(fc, fn_);
                for &rel in &em.relations {
                    assert!(mgr.leq(rel, mono));
                }
            }
            let next = mgr.var_set(&em.map.next_vars()).unwrap();
            for (bi, block) in em.model.blocks.iter().enumerate() {
                for s in &states {
                    let sb = em.map.state(&mut mgr, s, false);
                    let succ = mgr.and(sb, em.relations[bi]);
                    let mut all = em.map.cur_vars();
                    all.extend(next.vars());
                    let count = mgr.sat_count(succ, &all);
                    assert_eq!(count, block.enabled(s) as u128);
                }
            }
        }
    }

    #[test]
    fn decode_inverts_encode() {
        let m = parse_model("var X : {a, b, c} init b; var Y : {p} init p; event F;").unwrap();
        let map = encode(&m, &VarOrder::Declaration).unwrap();
        for s in all_states(&[3, 1, 2]) {
            let mut asg = vec![false; map.num_bdd_vars() as usize];
            map.write_state(&s, &mut asg);
            assert_eq!(map.decode(&asg), Some(s));
        }
    }
}
