//! The generators of the reciprocal-transformation algebra of the gas dynamics system.

use crate::symkernel::{ex, Expr};

use super::algebra::{BasisElement, LieAlgebra};
use super::generator::{EquivalenceGenerator, Generator};

fn g(fields: [&str; 5], form: [[&str; 2]; 2]) -> Generator {
    Generator::new(fields.map(ex), form.map(|r| r.map(ex)))
}

/// Rotation of the velocity together with the differentials.
pub fn x1() -> Generator {
    g(["0", "-v", "u", "0", "0"], [["0", "-1"], ["1", "0"]])
}

/// Scaling of the differentials.
pub fn x2() -> Generator {
    g(["0", "0", "0", "0", "0"], [["1", "0"], ["0", "1"]])
}

/// `Y`, the generator as printed, whose flow reversed gives the rational one-parameter family.
pub fn y() -> Generator {
    g(
        ["rho^2*(u^2+v^2)", "p*u", "p*v", "p^2", "0"],
        [["-(p+rho*v^2)", "rho*u*v"], ["rho*u*v", "-(p+rho*u^2)"]],
    )
}

/// `Y/2`; with this normalization the commutator table has unit constants.
pub fn x3() -> Generator {
    y().scale(&Expr::frac(1, 2))
}

pub fn x4() -> Generator {
    g(["0", "u/2", "v/2", "p", "0"], [["-1/2", "0"], ["0", "-1/2"]])
}

pub fn x5() -> Generator {
    g(["0", "0", "0", "1", "0"], [["0", "0"], ["0", "0"]])
}

/// `phi(S)(-2 rho d/drho + u d/du + v d/dv)` with `phi` given.
pub fn x_h_with(phi: &Expr) -> Generator {
    g(["-2*rho", "u", "v", "0", "0"], [["0", "0"], ["0", "0"]]).scale(phi)
}

/// `phi(S) d/dS`.
pub fn x_f_with(phi: &Expr) -> Generator {
    g(["0", "0", "0", "0", "1"], [["0", "0"], ["0", "0"]]).scale(phi)
}

pub fn x_h() -> Generator {
    x_h_with(&ex("h(S)"))
}

pub fn x_f() -> Generator {
    x_f_with(&ex("F(S)"))
}

/// `{X1, X2, X3, X4, X5, X_h, X_F}` with `X3 = Y/2`.
pub fn lrt() -> LieAlgebra {
    LieAlgebra::new(vec![
        BasisElement::constant("X1", x1()),
        BasisElement::constant("X2", x2()),
        BasisElement::constant("X3", x3()),
        BasisElement::constant("X4", x4()),
        BasisElement::constant("X5", x5()),
        BasisElement::functional("X_h", "h", x_h_with(&Expr::one())),
        BasisElement::functional("X_F", "F", x_f_with(&Expr::one())),
    ])
    .expect("the reciprocal algebra is closed")
}

/// `{X3, X4, X5}`.
pub fn lrt_second_derived() -> LieAlgebra {
    LieAlgebra::new(vec![
        BasisElement::constant("X3", x3()),
        BasisElement::constant("X4", x4()),
        BasisElement::constant("X5", x5()),
    ])
    .expect("closed")
}

/// Point equivalence generators `X1^e .. X6^e, X_h^e, X_F^e`.
pub fn equivalence_generators() -> Vec<(&'static str, EquivalenceGenerator)> {
    let e = |xi: [&str; 2], f: [&str; 5]| EquivalenceGenerator::parse(xi, f).unwrap();
    vec![
        ("X1e", e(["1", "0"], ["0", "0", "0", "0", "0"])),
        ("X2e", e(["0", "1"], ["0", "0", "0", "0", "0"])),
        ("X3e", e(["-y", "x"], ["0", "-v", "u", "0", "0"])),
        ("X4e", e(["x", "y"], ["0", "0", "0", "0", "0"])),
        ("X5e", e(["0", "0"], ["rho", "0", "0", "p", "0"])),
        ("X6e", e(["0", "0"], ["0", "0", "0", "1", "0"])),
        ("X_h^e", e(["0", "0"], ["-2*rho*h(S)", "u*h(S)", "v*h(S)", "0", "0"])),
        ("X_F^e", e(["0", "0"], ["0", "0", "0", "0", "F(S)"])),
    ]
}
