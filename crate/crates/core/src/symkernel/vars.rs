//! Declared variables and their roles.

use std::collections::BTreeMap;

use super::atom::Symbol;
use super::expr::Expr;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Coordinate,
    Field,
    Differential,
    Parameter,
    /// First derivative of a field with respect to a coordinate.
    Jet,
}

pub const COORDS: [&str; 2] = ["x", "y"];
pub const FIELDS: [&str; 5] = ["rho", "u", "v", "p", "S"];

/// Jet variable name for `d field / d coord`, e.g. `u_x`.
pub fn jet_name(field: &str, coord: &str) -> String {
    format!("{field}_{coord}")
}

#[derive(Clone, Debug)]
pub struct VarTable {
    order: Vec<Symbol>,
    roles: BTreeMap<Symbol, Role>,
    jets: BTreeMap<Symbol, (Symbol, Symbol)>,
}

impl VarTable {
    pub fn empty() -> Self {
        VarTable {
            order: Vec::new(),
            roles: BTreeMap::new(),
            jets: BTreeMap::new(),
        }
    }

    /// Coordinates, gas fields, their first jets and the two differentials.
    pub fn gas() -> Self {
        let mut t = VarTable::empty();
        for c in COORDS {
            t.declare(c, Role::Coordinate).unwrap();
        }
        for f in FIELDS {
            t.declare(f, Role::Field).unwrap();
        }
        for f in FIELDS {
            for c in COORDS {
                t.declare_jet(f, c).unwrap();
            }
        }
        t.declare("dx", Role::Differential).unwrap();
        t.declare("dy", Role::Differential).unwrap();
        t
    }

    pub fn declare(&mut self, name: &str, role: Role) -> Result<Symbol> {
        let s = Symbol::new(name);
        if let Some(r) = self.roles.get(&s) {
            if *r == role {
                return Ok(s);
            }
            return Err(Error::InvalidParams(format!(
                "`{name}` already declared as {r:?}"
            )));
        }
        self.order.push(s.clone());
        self.roles.insert(s.clone(), role);
        Ok(s)
    }

    pub fn declare_jet(&mut self, field: &str, coord: &str) -> Result<Symbol> {
        let f = Symbol::new(field);
        let c = Symbol::new(coord);
        if self.roles.get(&f) != Some(&Role::Field) {
            return Err(Error::UnknownVariable(field.to_string()));
        }
        if self.roles.get(&c) != Some(&Role::Coordinate) {
            return Err(Error::UnknownVariable(coord.to_string()));
        }
        let s = self.declare(&jet_name(field, coord), Role::Jet)?;
        self.jets.insert(s.clone(), (f, c));
        Ok(s)
    }

    pub fn role(&self, name: &str) -> Option<Role> {
        self.roles.get(&Symbol::new(name)).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.roles.contains_key(&Symbol::new(name))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.order
    }

    pub fn with_role(&self, role: Role) -> Vec<Symbol> {
        self.order
            .iter()
            .filter(|s| self.roles[*s] == role)
            .cloned()
            .collect()
    }

    pub fn jet_parts(&self, jet: &str) -> Option<(&Symbol, &Symbol)> {
        self.jets.get(&Symbol::new(jet)).map(|(f, c)| (f, c))
    }

    fn require(&self, name: &str) -> Result<Symbol> {
        let s = Symbol::new(name);
        if self.roles.contains_key(&s) {
            Ok(s)
        } else {
            Err(Error::UnknownVariable(name.to_string()))
        }
    }

    /// Partial derivative with respect to a declared variable.
    pub fn diff(&self, e: &Expr, var: &str) -> Result<Expr> {
        let s = self.require(var)?;
        Ok(e.diff(&s))
    }

    /// Simultaneous substitution of declared variables.
    pub fn substitute(&self, e: &Expr, bindings: &[(&str, Expr)]) -> Result<Expr> {
        let mut m = BTreeMap::new();
        for (n, v) in bindings {
            m.insert(self.require(n)?, v.clone());
        }
        e.substitute(&m)
    }

    /// Checks that every variable occurring in `e` is declared.
    pub fn check(&self, e: &Expr) -> Result<()> {
        for s in e.free_symbols() {
            if !self.roles.contains_key(&s) {
                return Err(Error::UnknownVariable(s.name().to_string()));
            }
        }
        Ok(())
    }
}
