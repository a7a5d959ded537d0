//! Symbolic LTL tableau superimposed on an encoded model.
//!
//! One Boolean elementary variable is introduced per `X g`, and per
//! `X (g U h)` / `X (g R h)` for every until and release subformula. The
//! tableau constrains each elementary variable in the current state to agree
//! with the truth of its argument in the next state; until subformulas yield
//! fairness constraints `¬sat(g U h) ∨ sat(h)`.

use std::collections::HashMap;

use crate::bdd::{Bdd, BddManager, RenameMap, Var, VarSet};
use crate::encode::EncodedModel;
use crate::ltl::{Ltl, LtlError};

#[derive(Clone, Debug)]
pub struct Elementary {
    /// The `X`-rooted formula this variable stands for (desugared).
    pub formula: Ltl,
    pub cur: Var,
    pub next: Var,
}

/// The product of a model and the tableau of a formula `φ` in NNF.
#[derive(Clone, Debug)]
pub struct AugmentedModel {
    pub base: EncodedModel,
    pub phi: Ltl,
    pub elementary: Vec<Elementary>,
    /// Per block: base relation ∧ tableau constraint.
    pub relations: Vec<Bdd>,
    pub tableau: Bdd,
    /// One constraint per until subformula, or a single `⊤`.
    pub fairness: Vec<Bdd>,
    /// Augmented states committed to `φ`.
    pub commitment: Bdd,
    /// Encoded initial state; tableau variables unconstrained.
    pub initial: Bdd,
    /// Domain constraint of the base encoding.
    pub valid: Bdd,
    pub cur_vars: Vec<Var>,
    pub next_vars: Vec<Var>,
    pub cur_set: VarSet,
    pub next_set: VarSet,
    pub to_next: RenameMap,
    pub to_cur: RenameMap,
}

/// Builds the augmented model. `phi` should be in negation normal form (as
/// produced by [`crate::ltl::negate_property`]); `G`/`F` are desugared here.
pub fn build_tableau(
    mgr: &mut BddManager,
    base: EncodedModel,
    phi: &Ltl,
) -> Result<AugmentedModel, LtlError> {
    phi.check_atoms(&base.model)?;
    let formula = phi.desugar();

    let mut el_formulas: Vec<Ltl> = Vec::new();
    collect_elementary(&formula, &mut el_formulas);
    let first = mgr.add_vars(2 * el_formulas.len() as u32);
    let elementary: Vec<Elementary> = el_formulas
        .into_iter()
        .enumerate()
        .map(|(i, f)| Elementary {
            formula: f,
            cur: first + 2 * i as Var,
            next: first + 2 * i as Var + 1,
        })
        .collect();

    let mut cur_vars = base.map.cur_vars();
    cur_vars.extend(elementary.iter().map(|e| e.cur));
    let mut next_vars = base.map.next_vars();
    next_vars.extend(elementary.iter().map(|e| e.next));
    let pairs: Vec<(Var, Var)> = cur_vars
        .iter()
        .copied()
        .zip(next_vars.iter().copied())
        .collect();
    let to_next = mgr.rename_map(&pairs).expect("variables in range");
    let back: Vec<(Var, Var)> = pairs.iter().map(|&(c, n)| (n, c)).collect();
    let to_cur = mgr.rename_map(&back).expect("variables in range");
    let cur_set = mgr.var_set(&cur_vars).expect("variables in range");
    let next_set = mgr.var_set(&next_vars).expect("variables in range");

    let mut sat = Sat {
        base: &base,
        elementary: &elementary,
        memo: HashMap::new(),
    };

    let mut tableau = mgr.tt();
    for el in elementary.iter().rev() {
        let Ltl::Next(arg) = &el.formula else {
            unreachable!("elementary formulas are X-rooted")
        };
        let s = sat.sat(mgr, arg);
        let s_next = mgr.rename(s, &to_next).expect("interleaved order");
        let v = mgr.var(el.cur).expect("in range");
        let agree = mgr.iff(v, s_next);
        tableau = mgr.and(agree, tableau);
    }

    let mut untils = Vec::new();
    collect_untils(&formula, &mut untils);
    let mut fairness = Vec::new();
    for u in &untils {
        let Ltl::Until(_, h) = u else { unreachable!() };
        let su = sat.sat(mgr, u);
        let sh = sat.sat(mgr, h);
        let nsu = mgr.not(su);
        fairness.push(mgr.or(nsu, sh));
    }
    if fairness.is_empty() {
        fairness.push(mgr.tt());
    }

    let commitment = sat.sat(mgr, &formula);
    let relations = base
        .relations
        .iter()
        .map(|&r| mgr.and(r, tableau))
        .collect();

    Ok(AugmentedModel {
        initial: base.init,
        valid: base.valid,
        base,
        phi: phi.clone(),
        elementary,
        relations,
        tableau,
        fairness,
        commitment,
        cur_vars,
        next_vars,
        cur_set,
        next_set,
        to_next,
        to_cur,
    })
}

fn push_unique(out: &mut Vec<Ltl>, f: Ltl) {
    if !out.contains(&f) {
        out.push(f);
    }
}

fn collect_elementary(f: &Ltl, out: &mut Vec<Ltl>) {
    match f {
        Ltl::True | Ltl::False | Ltl::Atom(_) => {}
        Ltl::Not(g) => collect_elementary(g, out),
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) => {
            collect_elementary(a, out);
            collect_elementary(b, out);
        }
        Ltl::Next(g) => {
            collect_elementary(g, out);
            push_unique(out, f.clone());
        }
        Ltl::Until(a, b) | Ltl::Release(a, b) => {
            collect_elementary(a, out);
            collect_elementary(b, out);
            push_unique(out, Ltl::next(f.clone()));
        }
        Ltl::Globally(_) | Ltl::Finally(_) => unreachable!("desugared before tableau construction"),
    }
}

fn collect_untils(f: &Ltl, out: &mut Vec<Ltl>) {
    match f {
        Ltl::True | Ltl::False | Ltl::Atom(_) => {}
        Ltl::Not(g) | Ltl::Next(g) | Ltl::Globally(g) | Ltl::Finally(g) => collect_untils(g, out),
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Ltl::Until(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
            push_unique(out, f.clone());
        }
    }
}

struct Sat<'a> {
    base: &'a EncodedModel,
    elementary: &'a [Elementary],
    memo: HashMap<Ltl, Bdd>,
}

impl Sat<'_> {
    fn el(&self, mgr: &mut BddManager, f: &Ltl) -> Bdd {
        let e = self
            .elementary
            .iter()
            .find(|e| e.formula == *f)
            .expect("elementary formula registered");
        mgr.var(e.cur).expect("in range")
    }

    /// Augmented states in which `f` is asserted to hold.
    fn sat(&mut self, mgr: &mut BddManager, f: &Ltl) -> Bdd {
        if let Some(&b) = self.memo.get(f) {
            return b;
        }
        let r = match f {
            Ltl::True => mgr.tt(),
            Ltl::False => mgr.ff(),
            Ltl::Atom(a) => {
                let (v, x) = a.resolve(&self.base.model).expect("atoms checked");
                self.base.map.value(mgr, v, x, false)
            }
            Ltl::Not(g) => {
                let s = self.sat(mgr, g);
                mgr.not(s)
            }
            Ltl::And(a, b) => {
                let (x, y) = (self.sat(mgr, a), self.sat(mgr, b));
                mgr.and(x, y)
            }
            Ltl::Or(a, b) => {
                let (x, y) = (self.sat(mgr, a), self.sat(mgr, b));
                mgr.or(x, y)
            }
            Ltl::Implies(a, b) => {
                let (x, y) = (self.sat(mgr, a), self.sat(mgr, b));
                mgr.implies(x, y)
            }
            Ltl::Next(_) => self.el(mgr, f),
            Ltl::Until(a, b) => {
                let (x, y) = (self.sat(mgr, a), self.sat(mgr, b));
                let e = self.el(mgr, &Ltl::next(f.clone()));
                let keep = mgr.and(x, e);
                mgr.or(y, keep)
            }
            Ltl::Release(a, b) => {
                let (x, y) = (self.sat(mgr, a), self.sat(mgr, b));
                let e = self.el(mgr, &Ltl::next(f.clone()));
                let keep = mgr.or(x, e);
                mgr.and(y, keep)
            }
            Ltl::Globally(_) | Ltl::Finally(_) => unreachable!("desugared"),
        };
        self.memo.insert(f.clone(), r);
        r
    }
}

impl AugmentedModel {
    pub fn num_blocks(&self) -> usize {
        self.relations.len()
    }

    pub fn block_name(&self, b: usize) -> &str {
        &self.base.model.blocks[b].name
    }

    /// Decodes the base-model state of an augmented assignment indexed by
    /// BDD variable.
    pub fn decode_base(&self, assignment: &[bool]) -> Option<Vec<usize>> {
        self.base.map.decode(assignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::VarOrder;
    use crate::ltl::{negate_property, parse_ltl};
    use crate::model::parse_model;
    use crate::random::{random_model, RandomModelConfig};

    fn build(model: &str, prop: &str) -> (BddManager, AugmentedModel) {
        let m = parse_model(model).unwrap();
        let (mut mgr, em) = EncodedModel::new(&m, &VarOrder::Declaration).unwrap();
        let phi = parse_ltl(prop).unwrap().nnf();
        let aug = build_tableau(&mut mgr, em, &phi).unwrap();
        (mgr, aug)
    }

    #[test]
    fn one_until_one_constraint() {
        let (_, aug) = build("var P : {off, on} init off;", "F P = on");
        assert_eq!(aug.fairness.len(), 1);
        assert!(!aug.fairness[0].is_true());
        assert_eq!(aug.elementary.len(), 1);
    }

    #[test]
    fn propositional_formula() {
        let (mut mgr, aug) = build("var P : {off, on} init off;", "P = on");
        assert_eq!(aug.fairness.len(), 1);
        assert!(aug.fairness[0].is_true());
        let p = aug.base.map.value(&mut mgr, 0, 1, false);
        assert_eq!(aug.commitment, p);
        assert!(aug.elementary.is_empty());
    }

    #[test]
    fn unknown_atom_is_reported() {
        let m = parse_model("var P : {off, on} init off;").unwrap();
        let (mut mgr, em) = EncodedModel::new(&m, &VarOrder::Declaration).unwrap();
        let phi = parse_ltl("G P = up").unwrap();
        assert!(matches!(
            build_tableau(&mut mgr, em, &phi),
            Err(LtlError::UnknownValue { .. })
        ));
    }

    #[test]
    fn projection_onto_base_is_base_relation() {
        let cfg = RandomModelConfig::default();
        for seed in 0..10 {
            let m = random_model(&cfg, seed);
            let (mut mgr, em) = EncodedModel::new(&m, &VarOrder::Declaration).unwrap();
            let prop = parse_ltl("G (X0 = v0 -> F X1 != v0) & (X0 = v0 U X1 = v0)").unwrap();
            let aug = build_tableau(&mut mgr, em, &negate_property(&prop)).unwrap();
            let el: Vec<Var> = aug
                .elementary
                .iter()
                .flat_map(|e| [e.cur, e.next])
                .collect();
            let el_set = mgr.var_set(&el).unwrap();
            for (b, &r) in aug.relations.iter().enumerate() {
                assert_eq!(mgr.exists(&el_set, r), aug.base.relations[b]);
            }
        }
    }
}
