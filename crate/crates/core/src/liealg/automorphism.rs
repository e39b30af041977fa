//! Polynomial conditions for a matrix to define an automorphism of a Lie algebra
//! given by its structure constants.
//!
//! Convention: the image of basis member `i` is `sum_n a_ni X_n`, so the columns
//! of the matrix are the images. Preserving brackets gives, for all `i < j` and `n`,
//! `sum_{k,s} a_ki a_sj c_ks^n = sum_k c_ij^k a_nk`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::symkernel::{Expr, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct AutomorphismMatrix {
    /// Index labels of rows and columns, e.g. `["3", "4", "5"]`.
    pub labels: Vec<String>,
    pub a: Vec<Vec<Expr>>,
    pub a11: Option<Expr>,
}

impl AutomorphismMatrix {
    pub fn new(labels: &[&str], a: Vec<Vec<Expr>>) -> AutomorphismMatrix {
        AutomorphismMatrix {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            a,
            a11: None,
        }
    }

    pub fn identity(labels: &[&str]) -> AutomorphismMatrix {
        let n = labels.len();
        let a = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect())
            .collect();
        AutomorphismMatrix::new(labels, a)
    }

    /// Matrix whose entries are the free symbols `a_rc`.
    pub fn symbolic(labels: &[&str]) -> AutomorphismMatrix {
        let a = labels
            .iter()
            .map(|r| labels.iter().map(|c| Expr::symbol(&entry_symbol(r, c))).collect())
            .collect();
        AutomorphismMatrix::new(labels, a)
    }

    pub fn with_a11(mut self, a11: Expr) -> Self {
        self.a11 = Some(a11);
        self
    }

    pub fn det(&self) -> Expr {
        linalg::det(&self.a)
    }

    /// `a_rc -> value` bindings.
    pub fn bindings(&self) -> BTreeMap<Symbol, Expr> {
        let mut m = BTreeMap::new();
        for (i, r) in self.labels.iter().enumerate() {
            for (j, c) in self.labels.iter().enumerate() {
                m.insert(entry_symbol(r, c), self.a[i][j].clone());
            }
        }
        m
    }

    /// Case `a35 = 0`: `a34 = 0, a43 = a54 a33, a44 = 1, a45 = 0, a53 = a54^2 a33 / 2, a55 = 1/a33`.
    pub fn case_a35_zero(a33: &Expr, a54: &Expr) -> Result<AutomorphismMatrix> {
        if a33.is_zero() {
            return Err(Error::InvalidParams("a33 must be nonzero".into()));
        }
        let half = Expr::frac(1, 2);
        let a = vec![
            vec![a33.clone(), Expr::zero(), Expr::zero()],
            vec![a54.mul(a33), Expr::one(), Expr::zero()],
            vec![half.mul(&a54.mul(a54)).mul(a33), a54.clone(), a33.recip()?],
        ];
        Ok(AutomorphismMatrix::new(&["3", "4", "5"], a))
    }

    /// Case `a35 != 0`, parametrized by `a34, a35, a45`.
    pub fn case_a35_nonzero(a34: &Expr, a35: &Expr, a45: &Expr) -> Result<AutomorphismMatrix> {
        if a35.is_zero() {
            return Err(Error::InvalidParams("a35 must be nonzero".into()));
        }
        let two = Expr::int(2);
        let i35 = a35.recip()?;
        let a33 = a34.mul(a34).mul(&i35).scale(&half());
        let a43 = a34
            .mul(&a45.mul(a34).sub(&two.mul(a35)))
            .mul(&i35)
            .mul(&i35)
            .scale(&half());
        let a44 = a45.mul(a34).mul(&i35).sub(&Expr::one());
        let a53 = a45
            .mul(a45)
            .mul(a34)
            .mul(a34)
            .sub(&Expr::int(4).mul(a45).mul(a35).mul(a34))
            .add(&Expr::int(4).mul(a35).mul(a35))
            .mul(&i35.pow(3)?)
            .scale(&quarter());
        let a54 = a45
            .mul(&a45.mul(a34).sub(&two.mul(a35)))
            .mul(&i35)
            .mul(&i35)
            .scale(&half());
        let a55 = a45.mul(a45).mul(&i35).scale(&half());
        let a = vec![
            vec![a33, a34.clone(), a35.clone()],
            vec![a43, a44, a45.clone()],
            vec![a53, a54, a55],
        ];
        Ok(AutomorphismMatrix::new(&["3", "4", "5"], a))
    }
}

fn half() -> num_rational::BigRational {
    num_rational::BigRational::new(1.into(), 2.into())
}

fn quarter() -> num_rational::BigRational {
    num_rational::BigRational::new(1.into(), 4.into())
}

pub fn entry_symbol(row: &str, col: &str) -> Symbol {
    Symbol::new(&format!("a{row}{col}"))
}

/// The bracket-preservation equations for a constant table `c[i][j][k]`, normalized
/// up to a nonzero constant factor, without duplicates or trivial identities.
pub fn automorphism_constraints(c: &[Vec<Vec<Expr>>], labels: &[&str]) -> Vec<Expr> {
    let n = c.len();
    let a = AutomorphismMatrix::symbolic(labels).a;
    let mut out: BTreeSet<Expr> = BTreeSet::new();
    let mut ordered = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for m in 0..n {
                let mut lhs = Expr::zero();
                for k in 0..n {
                    for s in 0..n {
                        if !c[k][s][m].is_zero() {
                            lhs = lhs.add(&a[k][i].mul(&a[s][j]).mul(&c[k][s][m]));
                        }
                    }
                }
                let mut rhs = Expr::zero();
                for k in 0..n {
                    if !c[i][j][k].is_zero() {
                        rhs = rhs.add(&c[i][j][k].mul(&a[m][k]));
                    }
                }
                let eq = lhs.sub(&rhs);
                if eq.is_zero() {
                    continue;
                }
                let nf = eq.equation_normal_form();
                if out.insert(nf.clone()) {
                    ordered.push(nf);
                }
            }
        }
    }
    ordered
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomorphismReport {
    pub satisfied: bool,
    pub det: String,
    pub residuals: Vec<String>,
}

/// Substitutes the matrix into the constraints.
pub fn verify_automorphism_solution(
    a: &AutomorphismMatrix,
    constraints: &[Expr],
) -> Result<AutomorphismReport> {
    let det = a.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let b = a.bindings();
    let residuals: Vec<Expr> = constraints.iter().map(|e| e.subs_unchecked(&b)).collect();
    Ok(AutomorphismReport {
        satisfied: residuals.iter().all(|r| r.is_zero()),
        det: det.to_string(),
        residuals: residuals.iter().map(|r| r.to_string()).collect(),
    })
}
