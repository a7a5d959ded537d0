use std::fmt;

use super::{BddError, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: Var,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Self {
        Literal { var, positive }
    }
}

/// A conjunction of literals, sorted by variable, at most one per variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    lits: Vec<Literal>,
}

impl Cube {
    pub fn new<I: IntoIterator<Item = Literal>>(lits: I) -> Result<Self, BddError> {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(BddError::InconsistentCube(w[0].var));
        }
        Ok(Cube { lits })
    }

    pub fn empty() -> Self {
        Cube::default()
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn polarity(&self, var: Var) -> Option<bool> {
        self.lits
            .binary_search_by_key(&var, |l| l.var)
            .ok()
            .map(|i| self.lits[i].positive)
    }

    /// Whether the assignment (indexed by variable) satisfies every literal.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.lits
            .iter()
            .all(|l| assignment[l.var as usize] == l.positive)
    }

    /// Adds a literal in front of a cube over strictly larger variables.
    pub(crate) fn prepend(&mut self, lit: Literal) {
        debug_assert!(self.lits.first().is_none_or(|l| l.var > lit.var));
        self.lits.insert(0, lit);
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str("{}");
        }
        f.write_str("{")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "x{}{}", l.var, if l.positive { "+" } else { "-" })?;
        }
        f.write_str("}")
    }
}
