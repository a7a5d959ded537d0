//! Linear temporal logic formulas over `variable = value` atoms.

mod parser;

use std::fmt;

use thiserror::Error;

use crate::model::{Model, VarId};

pub use parser::parse_ltl;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtlError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown variable `{0}` in property")]
    UnknownVariable(String),
    #[error("`{value}` is not a value of `{var}`")]
    UnknownValue { var: String, value: String },
}

/// An atomic proposition `var = value`. Bare flag names parse as
/// `flag = true`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub var: String,
    pub value: String,
}

impl Atom {
    pub fn new(var: &str, value: &str) -> Self {
        Atom {
            var: var.to_string(),
            value: value.to_string(),
        }
    }

    /// Variable and value indices in `m`.
    pub fn resolve(&self, m: &Model) -> Result<(VarId, usize), LtlError> {
        let v = m
            .var_id(&self.var)
            .ok_or_else(|| LtlError::UnknownVariable(self.var.clone()))?;
        let x = m.variables[v]
            .value_index(&self.value)
            .ok_or_else(|| LtlError::UnknownValue {
                var: self.var.clone(),
                value: self.value.clone(),
            })?;
        Ok((v, x))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    False,
    Atom(Atom),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
    Globally(Box<Ltl>),
    Finally(Box<Ltl>),
}

impl Ltl {
    pub fn atom(var: &str, value: &str) -> Ltl {
        Ltl::Atom(Atom::new(var, value))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }

    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Ltl) -> Ltl {
        Ltl::Next(Box::new(f))
    }

    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }

    pub fn globally(f: Ltl) -> Ltl {
        Ltl::Globally(Box::new(f))
    }

    pub fn finally(f: Ltl) -> Ltl {
        Ltl::Finally(Box::new(f))
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Ltl::True | Ltl::False => {}
            Ltl::Atom(a) => out.push(a),
            Ltl::Not(f) | Ltl::Next(f) | Ltl::Globally(f) | Ltl::Finally(f) => f.collect_atoms(out),
            Ltl::And(a, b)
            | Ltl::Or(a, b)
            | Ltl::Implies(a, b)
            | Ltl::Until(a, b)
            | Ltl::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Checks every atom against the variables and values of `m`.
    pub fn check_atoms(&self, m: &Model) -> Result<(), LtlError> {
        self.atoms()
            .into_iter()
            .try_for_each(|a| a.resolve(m).map(|_| ()))
    }

    /// Negation normal form: negations only on atoms, no implications.
    /// `G` and `F` are kept.
    pub fn nnf(&self) -> Ltl {
        self.nnf_pol(true)
    }

    fn nnf_pol(&self, positive: bool) -> Ltl {
        use Ltl::*;
        match (self, positive) {
            (True, true) | (False, false) => True,
            (True, false) | (False, true) => False,
            (Atom(a), true) => Atom(a.clone()),
            (Atom(a), false) => Ltl::not(Atom(a.clone())),
            (Not(f), p) => f.nnf_pol(!p),
            (And(a, b), true) | (Or(a, b), false) => {
                Ltl::and(a.nnf_pol(positive), b.nnf_pol(positive))
            }
            (Or(a, b), true) | (And(a, b), false) => {
                Ltl::or(a.nnf_pol(positive), b.nnf_pol(positive))
            }
            (Implies(a, b), true) => Ltl::or(a.nnf_pol(false), b.nnf_pol(true)),
            (Implies(a, b), false) => Ltl::and(a.nnf_pol(true), b.nnf_pol(false)),
            (Next(f), p) => Ltl::next(f.nnf_pol(p)),
            (Until(a, b), true) | (Release(a, b), false) => {
                Ltl::until(a.nnf_pol(positive), b.nnf_pol(positive))
            }
            (Release(a, b), true) | (Until(a, b), false) => {
                Ltl::release(a.nnf_pol(positive), b.nnf_pol(positive))
            }
            (Globally(f), true) | (Finally(f), false) => Ltl::globally(f.nnf_pol(positive)),
            (Finally(f), true) | (Globally(f), false) => Ltl::finally(f.nnf_pol(positive)),
        }
    }

    /// Replaces `G f` by `false R f` and `F f` by `true U f`, recursively.
    pub fn desugar(&self) -> Ltl {
        use Ltl::*;
        match self {
            True | False | Atom(_) => self.clone(),
            Not(f) => Ltl::not(f.desugar()),
            And(a, b) => Ltl::and(a.desugar(), b.desugar()),
            Or(a, b) => Ltl::or(a.desugar(), b.desugar()),
            Implies(a, b) => Ltl::implies(a.desugar(), b.desugar()),
            Next(f) => Ltl::next(f.desugar()),
            Until(a, b) => Ltl::until(a.desugar(), b.desugar()),
            Release(a, b) => Ltl::release(a.desugar(), b.desugar()),
            Globally(f) => Ltl::release(False, f.desugar()),
            Finally(f) => Ltl::until(True, f.desugar()),
        }
    }

    /// Truth of the formula at every position of the ultimately periodic word
    /// `word[0..]` whose last position loops back to `loop_start`. `holds`
    /// decides atoms at a position.
    pub fn eval_lasso(
        &self,
        len: usize,
        loop_start: usize,
        holds: &dyn Fn(&Atom, usize) -> bool,
    ) -> Vec<bool> {
        assert!(loop_start < len, "lasso loop start out of range");
        let succ = |i: usize| if i + 1 < len { i + 1 } else { loop_start };
        use Ltl::*;
        match self {
            True => vec![true; len],
            False => vec![false; len],
            Atom(a) => (0..len).map(|i| holds(a, i)).collect(),
            Not(f) => f
                .eval_lasso(len, loop_start, holds)
                .into_iter()
                .map(|b| !b)
                .collect(),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                let x = a.eval_lasso(len, loop_start, holds);
                let y = b.eval_lasso(len, loop_start, holds);
                x.iter()
                    .zip(&y)
                    .map(|(&p, &q)| match self {
                        And(..) => p && q,
                        Or(..) => p || q,
                        _ => !p || q,
                    })
                    .collect()
            }
            Next(f) => {
                let x = f.eval_lasso(len, loop_start, holds);
                (0..len).map(|i| x[succ(i)]).collect()
            }
            Until(a, b) => {
                let x = a.eval_lasso(len, loop_start, holds);
                let y = b.eval_lasso(len, loop_start, holds);
                fix(len, false, |v, i| y[i] || (x[i] && v[succ(i)]))
            }
            Release(a, b) => {
                let x = a.eval_lasso(len, loop_start, holds);
                let y = b.eval_lasso(len, loop_start, holds);
                fix(len, true, |v, i| y[i] && (x[i] || v[succ(i)]))
            }
            Globally(f) => {
                let y = f.eval_lasso(len, loop_start, holds);
                fix(len, true, |v, i| y[i] && v[succ(i)])
            }
            Finally(f) => {
                let y = f.eval_lasso(len, loop_start, holds);
                fix(len, false, |v, i| y[i] || v[succ(i)])
            }
        }
    }
}

/// Iterates `v[i] = step(v, i)` from the constant `init` until stable.
fn fix(len: usize, init: bool, step: impl Fn(&[bool], usize) -> bool) -> Vec<bool> {
    let mut v = vec![init; len];
    loop {
        let mut changed = false;
        for i in (0..len).rev() {
            let b = step(&v, i);
            if b != v[i] {
                v[i] = b;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// `nnf(¬safe)`: the behaviour a counterexample must exhibit.
pub fn negate_property(safe: &Ltl) -> Ltl {
    Ltl::not(safe.clone()).nnf()
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.var, self.value)
    }
}

/// Fully parenthesised rendering that [`parse_ltl`] reads back unchanged.
impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Ltl::*;
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) => write!(f, "{a}"),
            Not(g) => match g.as_ref() {
                Atom(a) => write!(f, "{} != {}", a.var, a.value),
                _ => write!(f, "!{}", Wrapped(g)),
            },
            And(a, b) => write!(f, "{} & {}", Wrapped(a), Wrapped(b)),
            Or(a, b) => write!(f, "{} | {}", Wrapped(a), Wrapped(b)),
            Implies(a, b) => write!(f, "{} -> {}", Wrapped(a), Wrapped(b)),
            Next(g) => write!(f, "X {}", Wrapped(g)),
            Until(a, b) => write!(f, "{} U {}", Wrapped(a), Wrapped(b)),
            Release(a, b) => write!(f, "{} R {}", Wrapped(a), Wrapped(b)),
            Globally(g) => write!(f, "G {}", Wrapped(g)),
            Finally(g) => write!(f, "F {}", Wrapped(g)),
        }
    }
}

struct Wrapped<'a>(&'a Ltl);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Ltl::True | Ltl::False => write!(f, "{}", self.0),
            _ => write!(f, "({})", self.0),
        }
    }
}
