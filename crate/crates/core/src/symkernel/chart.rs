use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::SymError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Base,
    Fiber,
    DualFiber,
}

/// An ordered list of coordinate names, each tagged with a role.
/// Index positions are the `i`, `α` indices used everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
    roles: Vec<Role>,
}

impl Chart {
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = (S, Role)>) -> Result<Self, SymError> {
        let mut names = Vec::new();
        let mut roles = Vec::new();
        for (n, r) in coords {
            let n = n.into();
            if !is_identifier(&n) {
                return Err(SymError::BadCoordinate(n));
            }
            if names.contains(&n) {
                return Err(SymError::DuplicateCoordinate(n));
            }
            names.push(n);
            roles.push(r);
        }
        Ok(Chart { names, roles })
    }

    pub fn base<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, SymError> {
        Chart::new(names.into_iter().map(|n| (n, Role::Base)))
    }

    pub fn empty() -> Self {
        Chart { names: Vec::new(), roles: Vec::new() }
    }

    /// This chart followed by `more` coordinates.
    pub fn extended<S: Into<String>>(&self, more: impl IntoIterator<Item = (S, Role)>) -> Result<Self, SymError> {
        let existing = self.names.iter().cloned().zip(self.roles.iter().copied());
        Chart::new(existing.chain(more.into_iter().map(|(n, r)| (n.into(), r))))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn role(&self, i: usize) -> Role {
        self.roles[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &str> {
        self.names.iter().zip(&self.roles).filter(move |(_, r)| **r == role).map(|(n, _)| n.as_str())
    }

    pub fn coordinate(&self, i: usize) -> Expr {
        Expr::var(&self.names[i])
    }

    /// Partial derivative with respect to a declared coordinate.
    pub fn diff(&self, e: &Expr, var: &str) -> Result<Expr, SymError> {
        if !self.contains(var) {
            return Err(SymError::UnknownVariable(var.to_string()));
        }
        Ok(e.diff(var))
    }

    /// Every free variable of `e` is a coordinate of this chart.
    pub fn covers(&self, e: &Expr) -> Result<(), SymError> {
        match e.free_vars().into_iter().find(|v| !self.contains(v)) {
            Some(v) => Err(SymError::UnknownVariable(v)),
            None => Ok(()),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_must_be_unique() {
        assert!(matches!(Chart::base(["x", "x"]), Err(SymError::DuplicateCoordinate(_))));
        assert!(matches!(Chart::base(["2x"]), Err(SymError::BadCoordinate(_))));
    }

    #[test]
    fn diff_requires_declared_variable() {
        let c = Chart::base(["x"]).unwrap();
        assert!(c.diff(&Expr::var("x"), "q").is_err());
        assert!(c.diff(&Expr::var("x"), "x").unwrap().is_literal_one());
    }
}
