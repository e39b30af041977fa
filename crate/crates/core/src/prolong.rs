//! Prolongation of reciprocal generators, their determining equations, and a
//! polynomial-ansatz solver for them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gasdyn::{total_derivative, ConservationFormParams, GasSystem, OneForm};
use crate::liealg::lrt::{x1, x2, x4, x5, y};
use crate::liealg::generator::zero_form;
use crate::liealg::{EquivalenceGenerator, Generator};
use crate::linalg::{self, SparseEliminator, SparseRow};
use crate::symkernel::vars::{jet_name, COORDS, FIELDS};
use crate::symkernel::{Atom, Expr, Monomial, Symbol};

/// `zeta^{f_x}, zeta^{f_y}` keyed by jet name, before reduction.
pub fn prolong(x: &Generator) -> BTreeMap<String, Expr> {
    let m = &x.form;
    let mut out = BTreeMap::new();
    for (f, z) in FIELDS.iter().zip(&x.fields) {
        let fx = Expr::var(&jet_name(f, "x"));
        let fy = Expr::var(&jet_name(f, "y"));
        let zx = total_derivative(z, "x")
            .sub(&fx.mul(&m[0][0]))
            .sub(&fy.mul(&m[1][0]));
        let zy = total_derivative(z, "y")
            .sub(&fx.mul(&m[0][1]))
            .sub(&fy.mul(&m[1][1]));
        out.insert(jet_name(f, "x"), zx);
        out.insert(jet_name(f, "y"), zy);
    }
    out
}

/// Classical prolongation of a point generator acting on `x, y` as well.
pub fn prolong_point(x: &EquivalenceGenerator) -> BTreeMap<String, Expr> {
    let d = |e: &Expr, c: &str| total_derivative(e, c);
    let mut out = BTreeMap::new();
    for (f, z) in FIELDS.iter().zip(&x.fields) {
        let fx = Expr::var(&jet_name(f, "x"));
        let fy = Expr::var(&jet_name(f, "y"));
        for c in COORDS {
            let zc = d(z, c)
                .sub(&fx.mul(&d(&x.xi[0], c)))
                .sub(&fy.mul(&d(&x.xi[1], c)));
            out.insert(jet_name(f, c), zc);
        }
    }
    out
}

/// Prolonged action on an expression in the fields and first jets.
fn act(fields: &[Expr; 5], jets: &BTreeMap<String, Expr>, e: &Expr) -> Expr {
    let mut out = Expr::zero();
    for (f, z) in FIELDS.iter().zip(fields) {
        if !z.is_zero() {
            out = out.add(&z.mul(&e.diff_name(f)));
        }
    }
    for (j, z) in jets {
        if z.is_zero() {
            continue;
        }
        let d = e.diff_name(j);
        if !d.is_zero() {
            out = out.add(&z.mul(&d));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    /// `F1`..`F4` for the field equations, `d(zeta^dx)`, `d(zeta^dy)` for closedness.
    pub source: String,
    #[serde(serialize_with = "crate::report::ser_expr")]
    pub reduced: Expr,
}

#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    pub residuals: Vec<Residual>,
    pub system: GasSystem,
}

impl DeterminingSystem {
    pub fn is_satisfied(&self) -> bool {
        self.residuals.iter().all(|r| r.reduced.is_zero())
    }

    pub fn get(&self, source: &str) -> Option<&Expr> {
        self.residuals.iter().find(|r| r.source == source).map(|r| &r.reduced)
    }
}

impl fmt::Display for DeterminingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.residuals {
            let v = if r.reduced.is_zero() { "ok" } else { "nonzero" };
            writeln!(f, "{:<10} {:<8} {}", r.source, v, r.reduced)?;
        }
        write!(f, "verdict: {}", if self.is_satisfied() { "PASS" } else { "FAIL" })
    }
}

pub fn determining_residuals(x: &Generator) -> Result<DeterminingSystem> {
    determining_residuals_with(&GasSystem::default(), x)
}

/// The four reduced invariance conditions and the two closedness conditions of
/// the transformed differentials.
pub fn determining_residuals_with(sys: &GasSystem, x: &Generator) -> Result<DeterminingSystem> {
    x.validate()?;
    let jets = prolong(x);
    let mut residuals = Vec::with_capacity(6);
    for (i, eq) in sys.equations.iter().enumerate() {
        residuals.push(Residual {
            source: format!("F{}", i + 1),
            reduced: sys.reduce(&act(&x.fields, &jets, eq)),
        });
    }
    let m = &x.form;
    for (row, name) in [(0, "d(zeta^dx)"), (1, "d(zeta^dy)")] {
        let c = total_derivative(&m[row][1], "x").sub(&total_derivative(&m[row][0], "y"));
        residuals.push(Residual {
            source: name.into(),
            reduced: sys.reduce(&c),
        });
    }
    Ok(DeterminingSystem {
        residuals,
        system: sys.clone(),
    })
}

/// Invariance of the system under a point generator, with classical prolongation.
pub fn point_determining_residuals(x: &EquivalenceGenerator) -> DeterminingSystem {
    let sys = GasSystem::default();
    let jets = prolong_point(x);
    let residuals = sys
        .equations
        .iter()
        .enumerate()
        .map(|(i, eq)| Residual {
            source: format!("F{}", i + 1),
            reduced: sys.reduce(&act(&x.fields, &jets, eq)),
        })
        .collect();
    DeterminingSystem {
        residuals,
        system: sys,
    }
}

/// One coefficient of a residual split with respect to the parametric jets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientEquation {
    pub source: String,
    #[serde(serialize_with = "crate::report::ser_expr")]
    pub monomial: Expr,
    #[serde(serialize_with = "crate::report::ser_expr")]
    pub coeff: Expr,
}

/// All nonzero coefficients of the residuals as polynomials in the parametric jets.
pub fn split(ds: &DeterminingSystem) -> Result<Vec<CoefficientEquation>> {
    let jets = ds.system.parametric_jets();
    let mut out = Vec::new();
    for r in &ds.residuals {
        let parts = r
            .reduced
            .collect(&jets)
            .map_err(|e| Error::NotPolynomialInJets(format!("{}: {e}", r.source)))?;
        for (m, c) in parts {
            out.push(CoefficientEquation {
                source: r.source.clone(),
                monomial: Expr::monomial_expr(&m),
                coeff: c,
            });
        }
    }
    Ok(out)
}

/// Monomials in `rho, u, v, p` of total degree at most `d`, graded.
pub fn state_monomials(d: u32) -> Vec<Expr> {
    let mut out = Vec::new();
    for total in 0..=d {
        for a in (0..=total).rev() {
            for b in (0..=total - a).rev() {
                for c in (0..=total - a - b).rev() {
                    let e = total - a - b - c;
                    let mut m = Expr::one();
                    for (name, k) in [("rho", a), ("u", b), ("v", c), ("p", e)] {
                        for _ in 0..k {
                            m = m.mul(&Expr::var(name));
                        }
                    }
                    out.push(m);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct AnsatzOptions {
    pub max_degree: u32,
    /// Forces `zeta^p = 0`.
    pub no_pressure: bool,
}

impl AnsatzOptions {
    pub fn degree(max_degree: u32) -> Self {
        AnsatzOptions {
            max_degree,
            no_pressure: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnsatzSolution {
    pub options: AnsatzOptions,
    pub monomials: Vec<Expr>,
    /// `(slot, monomial index)` of each unknown.
    pub columns: Vec<(usize, usize)>,
    pub equations: usize,
    pub rank: usize,
    pub basis: Vec<Generator>,
    /// Coordinates of each basis generator in the unknowns.
    pub vectors: Vec<Vec<BigRational>>,
}

impl AnsatzSolution {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a generator in the ansatz unknowns, if it fits the ansatz.
    pub fn coordinates(&self, g: &Generator) -> Option<Vec<BigRational>> {
        let slots = g.slots();
        let index: BTreeMap<(usize, Expr), usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, &(s, m))| ((s, self.monomials[m].clone()), i))
            .collect();
        let mut v = vec![BigRational::zero(); self.columns.len()];
        let state: Vec<Symbol> = ["rho", "u", "v", "p"].iter().map(|s| Symbol::new(s)).collect();
        for (s, e) in slots.iter().enumerate() {
            let parts = e.collect(&state).ok()?;
            for (m, c) in parts {
                let c = c.as_rational()?;
                let i = *index.get(&(s, Expr::monomial_expr(&m)))?;
                v[i] = c;
            }
        }
        Some(v)
    }

    /// Whether the generator lies in the solution space.
    pub fn contains(&self, g: &Generator) -> bool {
        let Some(t) = self.coordinates(g) else {
            return false;
        };
        let mut m = self.vectors.clone();
        let r = linalg::rank(&m);
        m.push(t);
        linalg::rank(&m) == r
    }
}

fn to_integer_row(row: &BTreeMap<usize, BigRational>) -> SparseRow {
    let l = row
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    row.iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(&i, c)| (i, (c * BigRational::from_integer(l.clone())).to_integer()))
        .collect()
}

/// Poses every slot as a polynomial in `rho, u, v, p` of bounded degree with unknown
/// rational coefficients and solves the split determining equations exactly.
/// Every basis element is re-verified symbolically.
pub fn solve_ansatz(opts: &AnsatzOptions) -> Result<AnsatzSolution> {
    let sys = GasSystem::default();
    let monomials = state_monomials(opts.max_degree);
    let mut columns = Vec::new();
    for s in 0..9 {
        if opts.no_pressure && s == 3 {
            continue;
        }
        for m in 0..monomials.len() {
            columns.push((s, m));
        }
    }
    // the reduction divides by u; a fixed power clears every denominator
    let clear = Expr::var("u").pow(4)?;
    let mut rows: BTreeMap<(usize, Monomial), BTreeMap<usize, BigRational>> = BTreeMap::new();
    for (col, &(s, m)) in columns.iter().enumerate() {
        let mut slots: [Expr; 9] = std::array::from_fn(|_| Expr::zero());
        slots[s] = monomials[m].clone();
        let ds = determining_residuals_with(&sys, &Generator::from_slots(slots))?;
        for (eq, r) in ds.residuals.iter().enumerate() {
            if r.reduced.is_zero() {
                continue;
            }
            let e = r.reduced.mul(&clear);
            if !e.den().is_constant() {
                return Err(Error::NotPolynomialInJets(format!("{}: {}", r.source, r.reduced)));
            }
            let atoms: BTreeSet<Atom> = e.atoms();
            for (mono, c) in e.collect_atoms(&atoms)? {
                let c = c.as_rational().expect("all atoms collected");
                rows.entry((eq, mono)).or_default().insert(col, c);
            }
        }
    }
    let mut elim = SparseEliminator::new();
    for row in rows.values() {
        elim.insert(to_integer_row(row));
    }
    let vectors = elim.nullspace(columns.len());
    let mut basis = Vec::with_capacity(vectors.len());
    for v in &vectors {
        let mut slots: [Expr; 9] = std::array::from_fn(|_| Expr::zero());
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                let (s, m) = columns[i];
                slots[s] = slots[s].add(&monomials[m].scale(c));
            }
        }
        let g = Generator::from_slots(slots);
        let check = determining_residuals_with(&sys, &g)?;
        if !check.is_satisfied() {
            return Err(Error::Input(format!("ansatz solution failed re-verification: {g}")));
        }
        basis.push(g);
    }
    Ok(AnsatzSolution {
        options: opts.clone(),
        monomials,
        columns,
        equations: rows.len(),
        rank: elim.rank(),
        basis,
        vectors,
    })
}

/// The form coefficients forced by invariance of both conservation forms under a
/// generator with the given field coefficients, as `(zeta^dx, zeta^dy)`.
pub fn form_coeffs_from_invariance(
    params: &ConservationFormParams,
    zeta: [&Expr; 4],
) -> Result<(OneForm, OneForm)> {
    params.validate()?;
    let (a1, b1, a2, b2) = params.unscaled();
    let delta = params.delta();
    if delta.is_zero() {
        return Err(Error::DegenerateDelta);
    }
    let fields = [
        zeta[0].clone(),
        zeta[1].clone(),
        zeta[2].clone(),
        zeta[3].clone(),
        Expr::zero(),
    ];
    let x = Generator::new(fields, zero_form());
    let inv = delta.recip()?;
    // [[a1, b1], [a2, b2]] [m0; m1] = -[r1; r2]
    let solve = |r1: &Expr, r2: &Expr| -> (Expr, Expr) {
        let m0 = b1.mul(r2).sub(&b2.mul(r1)).mul(&inv);
        let m1 = a2.mul(r1).sub(&a1.mul(r2)).mul(&inv);
        (m0, m1)
    };
    let (m00, m10) = solve(&x.apply(&a1), &x.apply(&a2));
    let (m01, m11) = solve(&x.apply(&b1), &x.apply(&b2));
    Ok((OneForm::new(m00, m01), OneForm::new(m10, m11)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `zeta^p q13 != 0`.
    B,
    /// `zeta^p != 0`, `q13 = 0`.
    C,
}

fn require_zero(e: &Expr, what: &str) -> Result<()> {
    if e.is_zero() {
        Ok(())
    } else {
        Err(Error::ParamConstraintViolated(format!("{what} (got {e})")))
    }
}

/// The generator family of a case branch. `k` holds `[k]` for branch b and
/// `[k1, k2]` for branch c. The printed `Y` is used for the third generator.
pub fn case_generator(branch: Branch, q: &ConservationFormParams, k: &[Expr]) -> Result<Generator> {
    require_zero(&q.q22.sub(&q.q12), "q22 = q12")?;
    let q12 = &q.q12;
    let q13 = &q.q13;
    match branch {
        Branch::B => {
            require_zero(&q.q23.add(q13), "q23 = -q13")?;
            if q13.is_zero() {
                return Err(Error::ParamConstraintViolated("q13 != 0".into()));
            }
            let [kk] = k else {
                return Err(Error::InvalidParams("branch b takes one constant".into()));
            };
            let g = y()
                .add(&x4().scale(&q12.mul(&Expr::int(2))))
                .add(&x1().scale(q13))
                .add(&x5().scale(&q12.mul(q12).add(&q13.mul(q13))));
            Ok(g.scale(kk))
        }
        Branch::C => {
            require_zero(&q.q23, "q23 = 0")?;
            require_zero(q13, "q13 = 0")?;
            let [k1, k2] = k else {
                return Err(Error::InvalidParams("branch c takes two constants".into()));
            };
            let two_q12 = q12.mul(&Expr::int(2));
            let a = y().add(&x4().scale(&two_q12)).add(&x5().scale(&q12.mul(q12)));
            let b = x4().scale(&Expr::int(2)).add(&x5().scale(&two_q12)).sub(&x2());
            Ok(a.scale(k2).add(&b.scale(k1)))
        }
    }
}
