//! The stationary two-dimensional gas dynamics system, its conservation
//! laws written as differential 1-forms, and reduction on the solution manifold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symkernel::vars::{jet_name, COORDS, FIELDS};
use crate::symkernel::{ex, Expr, Symbol};

/// Which pair of derivatives is eliminated with the continuity and entropy equations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MainChoice {
    /// Solve for `S_x` and `rho_x` (needs `u != 0`).
    #[default]
    XDerivatives,
    /// Solve for `S_y` and `rho_y` (needs `v != 0`).
    YDerivatives,
}

/// A 1-form `dx * dx-coefficient + dy * dy-coefficient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    pub dx: Expr,
    pub dy: Expr,
}

impl OneForm {
    pub fn new(dx: Expr, dy: Expr) -> OneForm {
        OneForm { dx, dy }
    }

    pub fn zero() -> OneForm {
        OneForm::new(Expr::zero(), Expr::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.dx.is_zero() && self.dy.is_zero()
    }

    pub fn scale(&self, k: &Expr) -> OneForm {
        OneForm::new(self.dx.mul(k), self.dy.mul(k))
    }

    pub fn add(&self, o: &OneForm) -> OneForm {
        OneForm::new(self.dx.add(&o.dx), self.dy.add(&o.dy))
    }
}

/// Total derivative of an expression in `x, y` and the fields with respect to a coordinate.
/// The expression must not contain jet variables.
pub fn total_derivative(e: &Expr, coord: &str) -> Expr {
    let mut out = e.diff(&Symbol::new(coord));
    for f in FIELDS {
        let d = e.diff(&Symbol::new(f));
        if !d.is_zero() {
            out = out.add(&d.mul(&Expr::var(&jet_name(f, coord))));
        }
    }
    out
}

/// `D_x(b) - D_y(a)` for the form `a dx + b dy`, before reduction.
pub fn exterior_derivative(form: &OneForm) -> Expr {
    total_derivative(&form.dy, "x").sub(&total_derivative(&form.dx, "y"))
}

pub fn jet_symbols() -> Vec<Symbol> {
    FIELDS
        .iter()
        .flat_map(|f| COORDS.iter().map(move |c| Symbol::new(&jet_name(f, c))))
        .collect()
}

#[derive(Clone, Debug)]
pub struct GasSystem {
    pub equations: [Expr; 4],
    pub choice: MainChoice,
    main: BTreeMap<Symbol, Expr>,
}

impl Default for GasSystem {
    fn default() -> Self {
        GasSystem::new(MainChoice::XDerivatives)
    }
}

impl GasSystem {
    pub fn new(choice: MainChoice) -> GasSystem {
        let equations = [
            ex("rho_x*u + rho*u_x + rho_y*v + rho*v_y"),
            ex("rho*(u*u_x + v*u_y) + p_x"),
            ex("rho*(u*v_x + v*v_y) + p_y"),
            ex("u*S_x + v*S_y"),
        ];
        let mut main = BTreeMap::new();
        main.insert(Symbol::new("p_x"), ex("-rho*(u*u_x + v*u_y)"));
        main.insert(Symbol::new("p_y"), ex("-rho*(u*v_x + v*v_y)"));
        match choice {
            MainChoice::XDerivatives => {
                main.insert(Symbol::new("S_x"), ex("-v*S_y/u"));
                main.insert(Symbol::new("rho_x"), ex("-(rho*u_x + rho_y*v + rho*v_y)/u"));
            }
            MainChoice::YDerivatives => {
                main.insert(Symbol::new("S_y"), ex("-u*S_x/v"));
                main.insert(Symbol::new("rho_y"), ex("-(rho*u_x + rho_x*u + rho*v_y)/v"));
            }
        }
        GasSystem {
            equations,
            choice,
            main,
        }
    }

    pub fn main_derivatives(&self) -> &BTreeMap<Symbol, Expr> {
        &self.main
    }

    /// Jets left free after eliminating the main derivatives.
    pub fn parametric_jets(&self) -> Vec<Symbol> {
        jet_symbols()
            .into_iter()
            .filter(|j| !self.main.contains_key(j))
            .collect()
    }

    /// Substitutes the main derivatives. Their right-hand sides contain only
    /// parametric jets, so one pass is a projection.
    pub fn reduce(&self, e: &Expr) -> Expr {
        e.subs_unchecked(&self.main)
    }

    /// Symbolic side conditions under which the reduction is valid.
    pub fn domain_conditions(&self) -> Vec<String> {
        match self.choice {
            MainChoice::XDerivatives => vec!["u != 0".into(), "rho != 0".into()],
            MainChoice::YDerivatives => vec!["v != 0".into(), "rho != 0".into()],
        }
    }
}

/// Constants of the two momentum conservation forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservationFormParams {
    pub q11: Expr,
    pub q12: Expr,
    pub q13: Expr,
    pub q21: Expr,
    pub q22: Expr,
    pub q23: Expr,
}

impl ConservationFormParams {
    /// All six as free symbols `q11 .. q23`.
    pub fn symbolic() -> Self {
        ConservationFormParams {
            q11: Expr::var("q11"),
            q12: Expr::var("q12"),
            q13: Expr::var("q13"),
            q21: Expr::var("q21"),
            q22: Expr::var("q22"),
            q23: Expr::var("q23"),
        }
    }

    pub fn rational(q: [i64; 6]) -> Self {
        let e = |i: usize| Expr::int(q[i]);
        ConservationFormParams {
            q11: e(0),
            q12: e(1),
            q13: e(2),
            q21: e(3),
            q22: e(4),
            q23: e(5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q11.mul(&self.q21).is_zero() {
            return Err(Error::InvalidParams("q11*q21 must be nonzero".into()));
        }
        Ok(())
    }

    /// `p^2+(q12+q22)p+p rho q^2+q12 q22-q13 q23+rho(q12 u^2+q22 v^2)-(q13+q23) rho u v`,
    /// the determinant of the invariance system.
    pub fn delta(&self) -> Expr {
        let (a1, b1, a2, b2) = self.unscaled();
        a1.mul(&b2).sub(&b1.mul(&a2))
    }

    /// Coefficients of `S1/q11` and `S2/q21`.
    pub fn unscaled(&self) -> (Expr, Expr, Expr, Expr) {
        let ruv = ex("rho*u*v");
        let a1 = ex("p + rho*v^2").add(&self.q12);
        let b1 = ruv.add(&self.q13).neg();
        let a2 = ruv.add(&self.q23).neg();
        let b2 = ex("p + rho*u^2").add(&self.q22);
        (a1, b1, a2, b2)
    }
}

/// `S1 = q11((p+q12+rho v^2)dx - (rho u v+q13)dy)`,
/// `S2 = q21(-(rho u v+q23)dx + (p+q22+rho u^2)dy)`.
pub fn conservation_forms(params: &ConservationFormParams) -> Result<(OneForm, OneForm)> {
    params.validate()?;
    let (a1, b1, a2, b2) = params.unscaled();
    Ok((
        OneForm::new(a1, b1).scale(&params.q11),
        OneForm::new(a2, b2).scale(&params.q21),
    ))
}

/// Reduced exterior derivative of a form on the solution manifold.
pub fn closedness_residual(sys: &GasSystem, form: &OneForm) -> Expr {
    sys.reduce(&exterior_derivative(form))
}
