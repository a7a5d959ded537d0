//! Guarded-command transition systems with monotone basic event flags.

mod parser;

use std::fmt;

pub use parser::{parse_model, Diagnostic, DiagnosticKind, ModelError};

pub type VarId = usize;
pub type BlockId = usize;

/// Name of the block added by [`Model::complete`] to rule out deadlocks.
pub const STUTTER_BLOCK: &str = "stutter";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    State,
    /// A basic event flag: Boolean, initially false, never reset.
    Event,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<String>,
    pub initial: usize,
    pub kind: VarKind,
}

impl Variable {
    pub fn state(name: &str, domain: &[&str], initial: usize) -> Self {
        Variable {
            name: name.to_string(),
            domain: domain.iter().map(|s| s.to_string()).collect(),
            initial,
            kind: VarKind::State,
        }
    }

    pub fn event(name: &str) -> Self {
        Variable {
            name: name.to_string(),
            domain: vec!["false".into(), "true".into()],
            initial: 0,
            kind: VarKind::Event,
        }
    }

    pub fn is_event(&self) -> bool {
        self.kind == VarKind::Event
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }
}

/// Propositional guard expressions over variable/value atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Eq(VarId, usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn any(items: impl IntoIterator<Item = Expr>) -> Expr {
        items
            .into_iter()
            .reduce(Expr::or)
            .unwrap_or(Expr::Const(false))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn all(items: impl IntoIterator<Item = Expr>) -> Expr {
        items
            .into_iter()
            .reduce(Expr::and)
            .unwrap_or(Expr::Const(true))
    }

    pub fn eval(&self, state: &[usize]) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Eq(v, x) => state[*v] == *x,
            Expr::Not(e) => !e.eval(state),
            Expr::And(a, b) => a.eval(state) && b.eval(state),
            Expr::Or(a, b) => a.eval(state) || b.eval(state),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub guard: Expr,
    /// Assignments of constant values, in source order, at most one per variable.
    pub updates: Vec<(VarId, usize)>,
}

impl Block {
    pub fn enabled(&self, state: &[usize]) -> bool {
        self.guard.eval(state)
    }

    /// The successor of `state` under this block, ignoring the guard.
    pub fn apply(&self, state: &[usize]) -> Vec<usize> {
        let mut next = state.to_vec();
        for &(v, x) in &self.updates {
            next[v] = x;
        }
        next
    }

    pub fn assigns(&self, var: VarId) -> Option<usize> {
        self.updates
            .iter()
            .find(|(v, _)| *v == var)
            .map(|&(_, x)| x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Model {
    pub variables: Vec<Variable>,
    pub blocks: Vec<Block>,
}

impl Model {
    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn block_id(&self, name: &str) -> Option<BlockId> {
        self.blocks.iter().position(|b| b.name == name)
    }

    /// Basic event flags in declaration order.
    pub fn events(&self) -> Vec<VarId> {
        (0..self.variables.len())
            .filter(|&v| self.variables[v].is_event())
            .collect()
    }

    pub fn initial_state(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.initial).collect()
    }

    /// Checks the invariants the parser enforces; useful for models built in
    /// code.
    pub fn validate(&self) -> Result<(), String> {
        let mut names = std::collections::HashSet::new();
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                return Err(format!("duplicate name `{}`", v.name));
            }
            if v.domain.is_empty() || v.initial >= v.domain.len() {
                return Err(format!("bad domain or initial value for `{}`", v.name));
            }
        }
        let mut bnames = std::collections::HashSet::new();
        for b in &self.blocks {
            if !bnames.insert(b.name.as_str()) {
                return Err(format!("duplicate block `{}`", b.name));
            }
            let mut seen = std::collections::HashSet::new();
            for &(v, x) in &b.updates {
                let var = self
                    .variables
                    .get(v)
                    .ok_or_else(|| format!("block `{}` assigns unknown variable", b.name))?;
                if x >= var.domain.len() {
                    return Err(format!("block `{}` assigns out-of-range value", b.name));
                }
                if var.is_event() && x == 0 {
                    return Err(format!("block `{}` resets flag `{}`", b.name, var.name));
                }
                if !seen.insert(v) {
                    return Err(format!("block `{}` assigns `{}` twice", b.name, var.name));
                }
            }
        }
        Ok(())
    }

    /// Adds a default occurrence block for every event that no block raises,
    /// then a stutter block enabled exactly when no block other than the
    /// occurrence blocks is. Occurrence blocks are left out of the stutter
    /// guard so that a deadlock never forces a failure to happen. Applying it
    /// to an already completed model returns the model unchanged.
    pub fn complete(&self) -> Model {
        if self.is_complete() {
            return self.clone();
        }
        let mut m = self.clone();
        for e in self.events() {
            let raised = m.blocks.iter().any(|b| b.assigns(e) == Some(1));
            if !raised {
                let name = m.fresh_block_name(&format!("occur_{}", self.variables[e].name));
                m.blocks.push(Block {
                    name,
                    guard: Expr::not(Expr::Eq(e, 1)),
                    updates: vec![(e, 1)],
                });
            }
        }
        let guard = m.stutter_guard(&m.blocks);
        let name = m.fresh_block_name(STUTTER_BLOCK);
        m.blocks.push(Block {
            name,
            guard,
            updates: Vec::new(),
        });
        m
    }

    /// Whether `b` raises some basic event flag.
    pub fn is_occurrence_block(&self, b: &Block) -> bool {
        b.updates
            .iter()
            .any(|&(v, x)| self.variables[v].is_event() && x == 1)
    }

    fn stutter_guard(&self, blocks: &[Block]) -> Expr {
        Expr::not(Expr::any(
            blocks
                .iter()
                .filter(|b| !self.is_occurrence_block(b))
                .map(|b| b.guard.clone()),
        ))
    }

    /// Whether the last block is the stutter block for all the others and
    /// every event has a block raising it.
    pub fn is_complete(&self) -> bool {
        let Some((last, rest)) = self.blocks.split_last() else {
            return false;
        };
        last.updates.is_empty()
            && last.guard == self.stutter_guard(rest)
            && self
                .events()
                .into_iter()
                .all(|e| rest.iter().any(|b| b.assigns(e) == Some(1)))
    }

    fn fresh_block_name(&self, base: &str) -> String {
        let taken = |n: &str| self.blocks.iter().any(|b| b.name == n);
        if !taken(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !taken(n))
            .expect("unbounded name supply")
    }

    /// Renders `e` in the concrete guard syntax.
    pub fn expr_to_string(&self, e: &Expr) -> String {
        let mut s = String::new();
        self.write_expr(&mut s, e, Ctx::Top);
        s
    }

    fn write_expr(&self, out: &mut String, e: &Expr, ctx: Ctx) {
        match e {
            Expr::Const(b) => out.push_str(if *b { "true" } else { "false" }),
            Expr::Eq(v, x) => self.write_atom(out, *v, *x, false),
            Expr::Not(inner) => match inner.as_ref() {
                Expr::Eq(v, x) if !(self.variables[*v].is_event() && *x == 1) => {
                    self.write_atom(out, *v, *x, true)
                }
                _ => {
                    out.push('!');
                    self.write_expr(out, inner, Ctx::Unary);
                }
            },
            Expr::And(a, b) | Expr::Or(a, b) => {
                let is_and = matches!(e, Expr::And(..));
                let needs_parens = match ctx {
                    Ctx::Top => false,
                    Ctx::Unary => true,
                    Ctx::LeftOf(parent_and) => parent_and && !is_and,
                    Ctx::RightOf(parent_and) => parent_and || !is_and,
                };
                if needs_parens {
                    out.push('(');
                }
                self.write_expr(out, a, Ctx::LeftOf(is_and));
                out.push_str(if is_and { " & " } else { " | " });
                self.write_expr(out, b, Ctx::RightOf(is_and));
                if needs_parens {
                    out.push(')');
                }
            }
        }
    }

    fn write_atom(&self, out: &mut String, v: VarId, x: usize, negated: bool) {
        let var = &self.variables[v];
        if var.is_event() && x == 1 {
            if negated {
                out.push('!');
            }
            out.push_str(&var.name);
        } else {
            out.push_str(&var.name);
            out.push_str(if negated { " != " } else { " = " });
            out.push_str(&var.domain[x]);
        }
    }
}

#[derive(Clone, Copy)]
enum Ctx {
    Top,
    Unary,
    LeftOf(bool),
    RightOf(bool),
}

/// Canonical concrete syntax; [`parse_model`] reads it back to an equal model.
impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.variables {
            match v.kind {
                VarKind::Event => writeln!(f, "event {};", v.name)?,
                VarKind::State => writeln!(
                    f,
                    "var {} : {{{}}} init {};",
                    v.name,
                    v.domain.join(", "),
                    v.domain[v.initial]
                )?,
            }
        }
        for b in &self.blocks {
            writeln!(f)?;
            writeln!(f, "block {} {{", b.name)?;
            writeln!(f, "  guard: {};", self.expr_to_string(&b.guard))?;
            for &(v, x) in &b.updates {
                let var = &self.variables[v];
                writeln!(f, "  {} := {};", var.name, var.domain[x])?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
