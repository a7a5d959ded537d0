//! Irredundant sum-of-products covers (Minato-Morreale).

use std::rc::Rc;

use rustc_hash::FxHashMap;

use super::{Bdd, BddManager, Cube, Literal, NodeId, FALSE, TRUE};

type Cover = Rc<Vec<Cube>>;

impl BddManager {
    /// An irredundant cover of `f`. `⊥` yields the empty cover.
    pub fn isop(&mut self, f: Bdd) -> Vec<Cube> {
        self.isop_interval(f, f).0
    }

    /// An irredundant cover of some function `g` with `lower ⟹ g ⟹ upper`,
    /// together with `g` itself.
    pub fn isop_interval(&mut self, lower: Bdd, upper: Bdd) -> (Vec<Cube>, Bdd) {
        let (l, u) = (self.id(lower), self.id(upper));
        assert!(
            self.leq(lower, upper),
            "isop_interval: lower bound does not imply upper bound"
        );
        let mut memo = FxHashMap::default();
        let (cover, g) = self.isop_rec(l, u, &mut memo);
        (cover.as_ref().clone(), self.wrap(g))
    }

    fn isop_rec(
        &mut self,
        l: NodeId,
        u: NodeId,
        memo: &mut FxHashMap<(NodeId, NodeId), (Cover, NodeId)>,
    ) -> (Cover, NodeId) {
        if l == FALSE {
            return (Rc::new(Vec::new()), FALSE);
        }
        if u == TRUE {
            return (Rc::new(vec![Cube::empty()]), TRUE);
        }
        if let Some(hit) = memo.get(&(l, u)) {
            return hit.clone();
        }
        let v = self.level(l).min(self.level(u));
        let (l0, l1) = self.cofactors(l, v);
        let (u0, u1) = self.cofactors(u, v);

        let nu1 = self.not_rec(u1);
        let l0_only = self.and_rec(l0, nu1);
        let (c0, r0) = self.isop_rec(l0_only, u0, memo);

        let nu0 = self.not_rec(u0);
        let l1_only = self.and_rec(l1, nu0);
        let (c1, r1) = self.isop_rec(l1_only, u1, memo);

        let nr0 = self.not_rec(r0);
        let rest0 = self.and_rec(l0, nr0);
        let nr1 = self.not_rec(r1);
        let rest1 = self.and_rec(l1, nr1);
        let ld = self.or_rec(rest0, rest1);
        let ud = self.and_rec(u0, u1);
        let (cd, rd) = self.isop_rec(ld, ud, memo);

        let mut cover = Vec::with_capacity(c0.len() + c1.len() + cd.len());
        for (part, positive) in [(&c0, false), (&c1, true)] {
            for c in part.iter() {
                let mut c = c.clone();
                c.prepend(Literal::new(v, positive));
                cover.push(c);
            }
        }
        cover.extend(cd.iter().cloned());

        let lo = self.or_rec(r0, rd);
        let hi = self.or_rec(r1, rd);
        let g = self.mk(v, lo, hi);
        let result = (Rc::new(cover), g);
        memo.insert((l, u), result.clone());
        result
    }
}
