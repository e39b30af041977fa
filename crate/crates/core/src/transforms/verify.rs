//! Symbolic checks that a map carries solutions of the gas system to solutions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gasdyn::{total_derivative, GasSystem};
use crate::liealg::generator::form_inverse;
use crate::prolong::Residual;
use crate::report::ser_expr;
use crate::symkernel::vars::{jet_name, COORDS, FIELDS};
use crate::symkernel::{eval_exact, Atom, Expr, Symbol};

use super::{PointMap, ReciprocalMap};

pub const DEFAULT_SEED: u64 = 20240801;

#[derive(Clone, Debug, Serialize)]
pub struct SideCondition {
    pub name: String,
    #[serde(serialize_with = "ser_expr")]
    pub expr: Expr,
    /// Whether the expression is not identically zero.
    pub holds: bool,
}

/// A rational point where a residual does not vanish.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub source: String,
    pub point: BTreeMap<String, String>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MapReport {
    pub name: String,
    pub transformed: Vec<Residual>,
    pub closedness: Vec<Residual>,
    pub side: Vec<SideCondition>,
    pub form_constant: bool,
    pub witness: Option<Witness>,
    pub pass: bool,
}

impl MapReport {
    pub fn failing(&self) -> Vec<&str> {
        self.transformed
            .iter()
            .chain(&self.closedness)
            .filter(|r| !r.reduced.is_zero())
            .map(|r| r.source.as_str())
            .collect()
    }
}

/// Pulls `a dx' + b dy'` back through the form.
fn pull_back(t: &ReciprocalMap, a: &Expr, b: &Expr) -> (Expr, Expr) {
    let f = &t.form;
    (
        a.mul(&f[0][0]).add(&b.mul(&f[1][0])),
        a.mul(&f[0][1]).add(&b.mul(&f[1][1])),
    )
}

fn d_form(sys: &GasSystem, a: &Expr, b: &Expr) -> Expr {
    sys.reduce(&total_derivative(b, "x").sub(&total_derivative(a, "y")))
}

/// The new system in conservation form, as pairs `(a, b)` of `a dx' + b dy'`.
fn primed_forms(t: &ReciprocalMap) -> Vec<(&'static str, Expr, Expr)> {
    let [r, u, v, p, h] = &t.fields;
    let ru = r.mul(u);
    let rv = r.mul(v);
    vec![
        ("mass", rv.clone(), ru.neg()),
        ("momentum y", p.add(&rv.mul(v)), ru.mul(v).neg()),
        ("momentum x", ru.mul(v), ru.mul(u).add(p).neg()),
        ("entropy", rv.mul(h).neg(), ru.mul(h)),
    ]
}

pub fn verify_reciprocal(t: &ReciprocalMap) -> MapReport {
    verify_reciprocal_seeded(t, DEFAULT_SEED)
}

pub fn verify_reciprocal_seeded(t: &ReciprocalMap, seed: u64) -> MapReport {
    let sys = GasSystem::default();
    let transformed: Vec<Residual> = primed_forms(t)
        .into_iter()
        .map(|(name, a, b)| {
            let (a, b) = pull_back(t, &a, &b);
            Residual { source: name.into(), reduced: d_form(&sys, &a, &b) }
        })
        .collect();
    let closedness: Vec<Residual> = ["dx'", "dy'"]
        .iter()
        .zip(&t.form)
        .map(|(name, row)| Residual {
            source: format!("d({name})"),
            reduced: d_form(&sys, &row[0], &row[1]),
        })
        .collect();

    let mut side = vec![
        SideCondition { name: "det form".into(), expr: t.det(), holds: !t.det().is_zero() },
        SideCondition {
            name: "R".into(),
            expr: t.fields[0].clone(),
            holds: !t.fields[0].is_zero(),
        },
    ];
    let mut dens = BTreeSet::new();
    for e in t.fields.iter().chain(t.form.iter().flatten()) {
        let d = Expr::from_poly(e.den().clone());
        if !d.is_constant() {
            dens.insert(d);
        }
    }
    for d in dens {
        side.push(SideCondition { name: "denominator".into(), expr: d, holds: true });
    }

    let pass = transformed.iter().chain(&closedness).all(|r| r.reduced.is_zero())
        && side.iter().all(|c| c.holds);
    let witness = transformed
        .iter()
        .chain(&closedness)
        .find(|r| !r.reduced.is_zero())
        .and_then(|r| find_witness(&r.source, &r.reduced, seed));
    MapReport {
        name: t.name.clone(),
        transformed,
        closedness,
        side,
        form_constant: t.form_is_constant(),
        witness,
        pass,
    }
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigRational {
    let n: i64 = rng.gen_range(lo * 1000..=hi * 1000);
    BigRational::new(BigInt::from(n), BigInt::from(1000))
}

/// Searches random rational points for a nonzero value of `e`.
pub fn find_witness(source: &str, e: &Expr, seed: u64) -> Option<Witness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let syms = e.free_symbols();
    let formal: Vec<Atom> = e.atoms().into_iter().filter(|a| a.is_formal()).collect();
    for _ in 0..64 {
        let mut vars = BTreeMap::new();
        let mut point = BTreeMap::new();
        for s in &syms {
            let positive = matches!(s.name(), "rho" | "p");
            let v = if positive {
                random_rational(&mut rng, 1, 2)
            } else {
                random_rational(&mut rng, -2, 2)
            };
            point.insert(s.name().to_string(), v.to_string());
            vars.insert(s.clone(), v);
        }
        let mut fvals = BTreeMap::new();
        for a in &formal {
            let v = random_rational(&mut rng, 1, 2);
            point.insert(a.to_string(), v.to_string());
            fvals.insert(a.clone(), v);
        }
        if let Ok(v) = eval_exact(e, &vars, &|a| fvals.get(a).cloned()) {
            if !v.is_zero() {
                return Some(Witness { source: source.into(), point, value: v.to_string() });
            }
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub name: String,
    pub residuals: Vec<Residual>,
    #[serde(serialize_with = "ser_expr")]
    pub jacobian: Expr,
    pub pass: bool,
}

/// Substitutes the transformed fields and their derivatives into the equations,
/// then reduces on solutions of the original system.
pub fn verify_point_symmetry(t: &PointMap) -> PointReport {
    let sys = GasSystem::default();
    // rows: d/dx, d/dy; columns: x', y'
    let jt = [
        [total_derivative(&t.coords[0], "x"), total_derivative(&t.coords[1], "x")],
        [total_derivative(&t.coords[0], "y"), total_derivative(&t.coords[1], "y")],
    ];
    let jac = jt[0][0].mul(&jt[1][1]).sub(&jt[0][1].mul(&jt[1][0]));
    let Ok(inv) = form_inverse(&jt) else {
        return PointReport { name: t.name.clone(), residuals: Vec::new(), jacobian: jac, pass: false };
    };
    let mut b: BTreeMap<Symbol, Expr> = BTreeMap::new();
    for (f, e) in FIELDS.iter().zip(&t.fields) {
        let dx = total_derivative(e, "x");
        let dy = total_derivative(e, "y");
        for (k, c) in COORDS.iter().enumerate() {
            let jet = inv[k][0].mul(&dx).add(&inv[k][1].mul(&dy));
            b.insert(Symbol::new(&jet_name(f, c)), jet);
        }
        b.insert(Symbol::new(f), e.clone());
    }
    b.insert(Symbol::new("x"), t.coords[0].clone());
    b.insert(Symbol::new("y"), t.coords[1].clone());
    let residuals: Vec<Residual> = sys
        .equations
        .iter()
        .enumerate()
        .map(|(i, eq)| Residual {
            source: format!("F{}", i + 1),
            reduced: sys.reduce(&eq.subs_unchecked(&b)),
        })
        .collect();
    let pass = !jac.is_zero() && residuals.iter().all(|r| r.reduced.is_zero());
    PointReport { name: t.name.clone(), residuals, jacobian: jac, pass }
}
