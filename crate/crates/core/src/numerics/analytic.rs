//! Closed-form stationary solutions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gasdyn::GasSystem;
use crate::symkernel::vars::{jet_name, COORDS, FIELDS};
use crate::symkernel::{ex, Compiled, Expr, FnImpls, Symbol};

use super::{Field2D, Grid, GridSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// All fields constant.
    Constant,
    /// `u(y)`, `v = 0`, `rho(y)`, `S(y)`, constant `p`.
    Shear,
    /// Swirl `W(r) = omega r + kappa r^3` with constant density and entropy.
    Vortex,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "constant" => Ok(Family::Constant),
            "shear" => Ok(Family::Shear),
            "vortex" => Ok(Family::Vortex),
            _ => Err(Error::InvalidParams(format!("unknown solution family `{s}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::Shear => "shear",
            Family::Vortex => "vortex",
        }
    }

    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Family::Constant => &[("rho", "1"), ("u", "1"), ("v", "0"), ("p", "1"), ("S", "0")],
            Family::Shear => &[("u", "1+y^2"), ("rho", "1+y^2/2"), ("S", "y"), ("p", "1")],
            Family::Vortex => &[("omega", "1"), ("kappa", "0"), ("rho", "1"), ("p0", "1"), ("S", "0")],
        }
    }
}

/// Field expressions in `x, y`, checked to solve the system exactly.
pub struct AnalyticSolution {
    pub family: Family,
    pub params: BTreeMap<String, Expr>,
    pub fields: [Expr; 5],
    compiled: Vec<Compiled>,
}

impl fmt::Debug for AnalyticSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticSolution")
            .field("family", &self.family)
            .field("fields", &self.fields)
            .finish()
    }
}

impl AnalyticSolution {
    pub fn new(family: Family, params: &BTreeMap<String, Expr>) -> Result<AnalyticSolution> {
        let defaults = family.defaults();
        for k in params.keys() {
            if !defaults.iter().any(|(d, _)| d == k) {
                return Err(Error::InvalidParams(format!(
                    "{} has no parameter `{k}`",
                    family.name()
                )));
            }
        }
        let mut all = BTreeMap::new();
        for (k, d) in defaults {
            all.insert(k.to_string(), params.get(*k).cloned().unwrap_or_else(|| ex(d)));
        }
        let get = |k: &str| all[k].clone();
        let (x, y) = (Symbol::new("x"), Symbol::new("y"));
        let fields = match family {
            Family::Constant => {
                for (k, e) in &all {
                    if !e.is_constant() {
                        return Err(Error::InvalidParams(format!("constant flow needs a number for {k}")));
                    }
                }
                [get("rho"), get("u"), get("v"), get("p"), get("S")]
            }
            Family::Shear => {
                for (k, e) in &all {
                    if e.depends_on(&x) {
                        return Err(Error::InvalidParams(format!("shear profile {k} depends on x")));
                    }
                }
                if !get("p").is_constant() {
                    return Err(Error::InvalidParams("shear flow needs a constant pressure".into()));
                }
                [get("rho"), get("u"), Expr::zero(), get("p"), get("S")]
            }
            Family::Vortex => {
                for (k, e) in &all {
                    if !e.is_constant() {
                        return Err(Error::InvalidParams(format!("vortex parameter {k} must be a number")));
                    }
                }
                let r2 = ex("x^2+y^2");
                let bind = [
                    ("omega", get("omega")),
                    ("kappa", get("kappa")),
                    ("rho", get("rho")),
                    ("p0", get("p0")),
                    ("r2", r2),
                ];
                [
                    get("rho"),
                    ex("-(omega+kappa*r2)*y").subs(&bind),
                    ex("(omega+kappa*r2)*x").subs(&bind),
                    ex("p0 + rho*(omega^2*r2/2 + omega*kappa*r2^2/2 + kappa^2*r2^3/6)").subs(&bind),
                    get("S"),
                ]
            }
        };
        for e in &fields {
            for s in e.free_symbols() {
                if s != x && s != y {
                    return Err(Error::InvalidParams(format!("{e} depends on {}", s.name())));
                }
            }
        }
        let residuals = exact_residuals(&fields);
        if let Some((k, r)) = residuals.iter().enumerate().find(|(_, r)| !r.is_zero()) {
            return Err(Error::InvalidParams(format!(
                "{} profile does not solve equation {}: residual {r}",
                family.name(),
                k + 1
            )));
        }
        let inputs = [x, y];
        let fns = FnImpls::new();
        let compiled = fields
            .iter()
            .map(|e| Compiled::new(e, &inputs, &fns))
            .collect::<Result<_>>()?;
        Ok(AnalyticSolution { family, params: all, fields, compiled })
    }
}

/// The four equations evaluated on field expressions in `x, y`.
pub fn exact_residuals(fields: &[Expr; 5]) -> [Expr; 4] {
    let mut pairs: Vec<(String, Expr)> = Vec::new();
    for (f, e) in FIELDS.iter().zip(fields) {
        pairs.push((f.to_string(), e.clone()));
        for c in COORDS {
            pairs.push((jet_name(f, c), e.diff_name(c)));
        }
    }
    let refs: Vec<(&str, Expr)> = pairs.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    GasSystem::default().equations.map(|eq| eq.subs(&refs))
}

impl Field2D for AnalyticSolution {
    fn eval(&self, x: f64, y: f64) -> Result<[f64; 5]> {
        let mut out = [0.0; 5];
        for (o, c) in out.iter_mut().zip(&self.compiled) {
            *o = c.eval(&[x, y])?;
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}({})", self.family.name(), ps.join(", "))
    }
}

/// Samples an exact solution on `grid`. Density must stay positive on the nodes
/// and a vortex grid must keep away from the axis.
pub fn make_solution(family: Family, params: &BTreeMap<String, Expr>, grid: Grid) -> Result<GridSolution> {
    let a = AnalyticSolution::new(family, params)?;
    if family == Family::Vortex {
        let straddles = |lo: f64, hi: f64| lo <= 0.0 && hi >= 0.0;
        if straddles(grid.x0, grid.x1()) && straddles(grid.y0, grid.y1()) {
            return Err(Error::InvalidParams("vortex grid contains r = 0".into()));
        }
    }
    let sol = GridSolution::sample(grid, Arc::new(a))?;
    if let Some(k) = sol.rho.iter().position(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParams(format!("density {} at node {k} is not positive", sol.rho[k])));
    }
    Ok(sol)
}
