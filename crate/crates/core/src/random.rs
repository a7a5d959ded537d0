//! Seeded random models for property tests and the `gen-random-model` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ltl::Ltl;
use crate::model::{Block, Expr, Model, VarId, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomModelConfig {
    /// Number of non-flag state variables.
    pub vars: usize,
    /// Largest domain size; each variable draws a size in `1..=max_domain`.
    pub max_domain: usize,
    /// Number of basic event flags.
    pub flags: usize,
    /// Number of ordinary (non-occurrence) blocks.
    pub blocks: usize,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        RandomModelConfig {
            vars: 3,
            max_domain: 3,
            flags: 3,
            blocks: 5,
        }
    }
}

/// Draws a well-formed model. Each variable starts below its last value and
/// only failure-effect blocks, guarded on one or two raised flags, ever write
/// the last value. Flags are raised either by a default occurrence block
/// (added on completion) or by a custom occurrence block with an extra
/// precondition.
pub fn random_model(cfg: &RandomModelConfig, seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Model::default();
    for i in 0..cfg.vars {
        let k = if cfg.max_domain <= 1 || rng.gen_bool(0.05) {
            1
        } else {
            rng.gen_range(2..=cfg.max_domain)
        };
        let domain: Vec<String> = (0..k).map(|j| format!("v{j}")).collect();
        m.variables.push(Variable {
            name: format!("X{i}"),
            domain,
            initial: rng.gen_range(0..(k - 1).max(1)),
            kind: crate::model::VarKind::State,
        });
    }
    for j in 0..cfg.flags {
        m.variables.push(Variable::event(&format!("F{j}")));
    }
    let state_vars: Vec<VarId> = (0..cfg.vars).collect();
    let flags: Vec<VarId> = (cfg.vars..cfg.vars + cfg.flags).collect();

    for b in 0..cfg.blocks {
        let effect = !flags.is_empty() && !state_vars.is_empty() && rng.gen_bool(0.4);
        let mut lits = Vec::new();
        let n_lits = rng.gen_range(0..=if effect { 1 } else { 2 });
        for _ in 0..n_lits {
            if let Some(l) = random_literal(&m, &state_vars, &mut rng) {
                lits.push(l);
            }
        }
        let mut updates = Vec::new();
        if effect {
            // failure effect: needs one or two raised flags and drives a
            // variable to its last value
            let n_flags = rng.gen_range(1..=2.min(flags.len()));
            for &f in flags.choose_multiple(&mut rng, n_flags) {
                lits.push(Expr::Eq(f, 1));
            }
            let &v = state_vars.choose(&mut rng).unwrap();
            updates.push((v, m.variables[v].domain.len() - 1));
        } else {
            if !flags.is_empty() && rng.gen_bool(0.4) {
                let f = *flags.choose(&mut rng).unwrap();
                lits.push(Expr::not(Expr::Eq(f, 1)));
            }
            if !state_vars.is_empty() {
                let n_up = rng.gen_range(1..=2.min(state_vars.len()));
                let mut targets = state_vars.clone();
                targets.shuffle(&mut rng);
                for &v in targets.iter().take(n_up) {
                    // nominal behaviour stays below the last value
                    let k = m.variables[v].domain.len();
                    updates.push((v, rng.gen_range(0..(k - 1).max(1))));
                }
                updates.sort_unstable();
            }
        }
        m.blocks.push(Block {
            name: format!("b{b}"),
            guard: Expr::all(lits),
            updates,
        });
    }
    for &f in &flags {
        if rng.gen_bool(0.5) {
            let mut guard = Expr::not(Expr::Eq(f, 1));
            if let Some(l) = random_literal(&m, &state_vars, &mut rng) {
                guard = Expr::and(guard, l);
            }
            let name = format!("fail_{}", m.variables[f].name);
            m.blocks.push(Block {
                name,
                guard,
                updates: vec![(f, 1)],
            });
        }
    }
    m
}

fn random_literal(m: &Model, vars: &[VarId], rng: &mut ChaCha8Rng) -> Option<Expr> {
    let &v = vars.choose(rng)?;
    let k = m.variables[v].domain.len();
    let atom = Expr::Eq(v, rng.gen_range(0..k));
    Some(if rng.gen_bool(0.3) {
        Expr::not(atom)
    } else {
        atom
    })
}

/// Safety property shapes used by the randomised equivalence checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schema {
    /// `G p`
    Always,
    /// `F p`
    Eventually,
    /// `G (p -> F q)`
    Response,
    /// `G F p`
    InfinitelyOften,
}

impl Schema {
    pub const ALL: [Schema; 4] = [
        Schema::Always,
        Schema::Eventually,
        Schema::Response,
        Schema::InfinitelyOften,
    ];

    pub fn instantiate(self, p: Ltl, q: Ltl) -> Ltl {
        match self {
            Schema::Always => Ltl::globally(p),
            Schema::Eventually => Ltl::finally(p),
            Schema::Response => Ltl::globally(Ltl::implies(p, Ltl::finally(q))),
            Schema::InfinitelyOften => Ltl::globally(Ltl::finally(p)),
        }
    }
}

/// A random proposition over the state variables of `m`: a literal or a
/// conjunction/disjunction of two.
pub fn random_proposition(m: &Model, rng: &mut ChaCha8Rng) -> Ltl {
    let vars: Vec<VarId> = (0..m.variables.len())
        .filter(|&v| !m.variables[v].is_event())
        .collect();
    let lit = |rng: &mut ChaCha8Rng| -> Ltl {
        let Some(&v) = vars.choose(rng) else {
            return Ltl::True;
        };
        let var = &m.variables[v];
        // half of the atoms name the value only failures can produce
        let k = var.domain.len();
        let x = if rng.gen_bool(0.5) {
            k - 1
        } else {
            rng.gen_range(0..k)
        };
        let atom = Ltl::atom(&var.name, &var.domain[x]);
        if rng.gen_bool(0.5) {
            Ltl::not(atom)
        } else {
            atom
        }
    };
    match rng.gen_range(0..4) {
        0 => Ltl::and(lit(rng), lit(rng)),
        1 => Ltl::or(lit(rng), lit(rng)),
        _ => lit(rng),
    }
}

/// Two random propositions drawn from a seeded generator.
pub fn random_propositions(m: &Model, seed: u64) -> (Ltl, Ltl) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_proposition(m, &mut rng);
    let q = random_proposition(m, &mut rng);
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_model() {
        let cfg = RandomModelConfig::default();
        assert_eq!(random_model(&cfg, 7), random_model(&cfg, 7));
        assert!(random_model(&cfg, 7).validate().is_ok());
    }

    #[test]
    fn respects_knobs() {
        let cfg = RandomModelConfig {
            vars: 4,
            max_domain: 4,
            flags: 5,
            blocks: 6,
        };
        for seed in 0..20 {
            let m = random_model(&cfg, seed);
            assert_eq!(m.events().len(), 5);
            assert_eq!(m.variables.len(), 9);
            assert!(m.variables.iter().all(|v| v.domain.len() <= 4));
            assert!(m.blocks.len() >= 6);
            m.validate().unwrap();
        }
    }
}
