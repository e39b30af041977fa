//! Finite-dimensional algebras of generators, possibly with members that
//! carry one arbitrary function of `S`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::symkernel::Expr;

use super::generator::{commutator, Generator};
use super::span::{coefficient_rows, depends_on_state, involves_functions, non_parameter, solve_in_span};

/// A basis member. A functional member stands for `phi(S) * template` with `phi` arbitrary.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub label: String,
    pub template: Generator,
    /// Name of the arbitrary function, if any.
    pub func: Option<String>,
}

impl BasisElement {
    pub fn constant(label: &str, g: Generator) -> BasisElement {
        BasisElement {
            label: label.to_string(),
            template: g,
            func: None,
        }
    }

    pub fn functional(label: &str, func: &str, template: Generator) -> BasisElement {
        BasisElement {
            label: label.to_string(),
            template,
            func: Some(func.to_string()),
        }
    }

    pub fn is_functional(&self) -> bool {
        self.func.is_some()
    }

    /// The member with its function replaced by `phi`.
    pub fn instance(&self, phi: &Expr) -> Generator {
        self.template.scale(phi)
    }

    /// The member with a formal function named `name` applied to `S`.
    pub fn generic_named(&self, name: &str) -> Generator {
        match &self.func {
            None => self.template.clone(),
            Some(_) => self.instance(&Expr::func(name, vec![Expr::var("S")])),
        }
    }

    pub fn generic(&self) -> Generator {
        match &self.func {
            None => self.template.clone(),
            Some(f) => self.generic_named(f),
        }
    }
}

/// `coeff * basis[index]`, instantiated at `arg` for functional members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Expr,
    pub index: usize,
    pub arg: Option<Expr>,
}

pub type Combination = Vec<Term>;

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub basis: Vec<BasisElement>,
    /// `table[i][j]` expresses `[B_i, B_j]`.
    pub table: Vec<Vec<Combination>>,
}

/// Fresh function name for the right-hand member when both members share a name.
fn fresh(name: &str) -> String {
    format!("{name}_b")
}

/// Expresses `g` in the basis; functional members may absorb any function of `S`.
pub fn express(g: &Generator, basis: &[BasisElement]) -> Option<Combination> {
    let columns: Vec<Generator> = basis.iter().map(|b| b.template.clone()).collect();
    let coeffs = solve_in_span(g, &columns, &depends_on_state)?;
    let mut out = Vec::new();
    for (i, c) in coeffs.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if basis[i].is_functional() {
            let (coeff, arg) = if c.is_negative_leading() {
                (Expr::int(-1), c.neg())
            } else {
                (Expr::one(), c)
            };
            out.push(Term {
                coeff,
                index: i,
                arg: Some(arg),
            });
        } else {
            if involves_functions(&c) {
                return None;
            }
            out.push(Term {
                coeff: c,
                index: i,
                arg: None,
            });
        }
    }
    Some(out)
}

/// Table of brackets of all basis pairs.
pub fn structure_constants(basis: &[BasisElement]) -> Result<Vec<Vec<Combination>>> {
    let n = basis.len();
    let mut table = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if j < i {
                table[i][j] = table[j][i]
                    .iter()
                    .map(|t: &Term| Term {
                        coeff: t.coeff.neg(),
                        ..t.clone()
                    })
                    .collect();
                continue;
            }
            // a member brackets to zero with itself; two instances of one
            // functional family with different functions are handled by
            // `functional_self_brackets`
            if i == j {
                continue;
            }
            let br = commutator(&basis[i].generic(), &basis[j].generic())?;
            table[i][j] = express(&br, basis).ok_or_else(|| Error::NotClosed {
                left: basis[i].label.clone(),
                right: basis[j].label.clone(),
                residual: br.to_string(),
            })?;
        }
    }
    Ok(table)
}

impl LieAlgebra {
    pub fn new(basis: Vec<BasisElement>) -> Result<LieAlgebra> {
        let table = structure_constants(&basis)?;
        Ok(LieAlgebra { basis, table })
    }

    /// `[phi1 T, phi2 T]` for each functional member with two independent functions.
    pub fn functional_self_brackets(&self) -> Result<Vec<(usize, Combination)>> {
        let mut out = Vec::new();
        for (i, b) in self.basis.iter().enumerate() {
            if let Some(f) = &b.func {
                let br = commutator(&b.generic(), &b.generic_named(&fresh(f)))?;
                let comb = express(&br, &self.basis).ok_or_else(|| Error::NotClosed {
                    left: b.label.clone(),
                    right: b.label.clone(),
                    residual: br.to_string(),
                })?;
                out.push((i, comb));
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.basis.iter().map(|b| b.label.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    pub fn has_functional(&self) -> bool {
        self.basis.iter().any(|b| b.is_functional())
    }

    /// `c[i][j][k]` for algebras without functional members.
    pub fn constant_table(&self) -> Option<Vec<Vec<Vec<Expr>>>> {
        if self.has_functional() {
            return None;
        }
        let n = self.dim();
        let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for t in &self.table[i][j] {
                    c[i][j][t.index] = c[i][j][t.index].add(&t.coeff);
                }
            }
        }
        Some(c)
    }

    pub fn render_term(&self, t: &Term) -> String {
        let label = &self.basis[t.index].label;
        let head = match &t.arg {
            None => label.clone(),
            Some(a) => format!("{label}[{a}]"),
        };
        if t.coeff.is_one() {
            head
        } else if t.coeff == Expr::int(-1) {
            format!("-{head}")
        } else {
            format!("({})*{head}", t.coeff)
        }
    }

    pub fn render_combination(&self, c: &Combination) -> String {
        if c.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = c.iter().map(|t| self.render_term(t)).collect();
        parts.join(" + ").replace("+ -", "- ")
    }

    /// Serializable form of the table.
    pub fn table_report(&self) -> TableReport {
        TableReport {
            labels: self.labels(),
            rows: self
                .table
                .iter()
                .map(|r| r.iter().map(|c| self.render_combination(c)).collect())
                .collect(),
        }
    }

    /// `[L, L]` with a basis taken from the original members when possible.
    pub fn derived(&self) -> LieAlgebra {
        let n = self.dim();
        let consts: Vec<usize> = (0..n).filter(|&i| !self.basis[i].is_functional()).collect();
        let mut vectors: Vec<Vec<Expr>> = Vec::new();
        let mut functional: Vec<usize> = Vec::new();
        for row in &self.table {
            for comb in row {
                let mut v = vec![Expr::zero(); consts.len()];
                for t in comb {
                    match &t.arg {
                        None => {
                            let k = consts.iter().position(|&c| c == t.index).unwrap();
                            v[k] = v[k].add(&t.coeff);
                        }
                        Some(_) => {
                            if !functional.contains(&t.index) {
                                functional.push(t.index);
                            }
                        }
                    }
                }
                if v.iter().any(|e| !e.is_zero()) {
                    vectors.push(v);
                }
            }
        }
        let mut basis = Vec::new();
        let r = if vectors.is_empty() { 0 } else { linalg::rank(&vectors) };
        let units: Vec<usize> = (0..consts.len())
            .filter(|&k| {
                let mut m = vectors.clone();
                let mut e = vec![Expr::zero(); consts.len()];
                e[k] = Expr::one();
                m.push(e);
                linalg::rank(&m) == r
            })
            .collect();
        if units.len() == r {
            for k in units {
                basis.push(self.basis[consts[k]].clone());
            }
        } else {
            let mut m = vectors.clone();
            linalg::rref(&mut m);
            for (idx, row) in m.iter().filter(|r| r.iter().any(|e| !e.is_zero())).enumerate() {
                let mut g = Generator::zero();
                for (k, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        g = g.add(&self.basis[consts[k]].template.scale(c));
                    }
                }
                basis.push(BasisElement::constant(&format!("D{}", idx + 1), g));
            }
        }
        functional.sort();
        for i in functional {
            basis.push(self.basis[i].clone());
        }
        LieAlgebra::new(basis).expect("derived algebra is closed")
    }

    /// Elements with constant coefficients over the constant members and the
    /// constant slices of the functional members that commute with every member.
    pub fn center(&self) -> LieAlgebra {
        let mut candidates: Vec<BasisElement> = Vec::new();
        for b in &self.basis {
            match &b.func {
                None => candidates.push(b.clone()),
                Some(_) => candidates.push(BasisElement::constant(
                    &format!("{}|1", b.label),
                    b.instance(&Expr::one()),
                )),
            }
        }
        let mut rows: Vec<Vec<Expr>> = Vec::new();
        for b in &self.basis {
            let target = b.generic();
            let brackets: Vec<Generator> = candidates
                .iter()
                .map(|c| commutator(&c.template, &target).expect("validated generators"))
                .collect();
            let (r, _) = coefficient_rows(&Generator::zero(), &brackets, &non_parameter);
            rows.extend(r);
        }
        let null = if rows.is_empty() {
            (0..candidates.len())
                .map(|i| {
                    let mut v = vec![Expr::zero(); candidates.len()];
                    v[i] = Expr::one();
                    v
                })
                .collect()
        } else {
            linalg::nullspace(&rows, candidates.len())
        };
        let mut basis = Vec::new();
        for (idx, v) in null.iter().enumerate() {
            let nz: Vec<usize> = (0..v.len()).filter(|&k| !v[k].is_zero()).collect();
            if nz.len() == 1 {
                basis.push(candidates[nz[0]].clone());
            } else {
                let mut g = Generator::zero();
                for &k in &nz {
                    g = g.add(&candidates[k].template.scale(&v[k]));
                }
                basis.push(BasisElement::constant(&format!("Z{}", idx + 1), g));
            }
        }
        LieAlgebra::new(basis).expect("center is abelian")
    }
}

/// Whether two sets of generators span the same space over the constants.
pub fn same_span(a: &[Generator], b: &[Generator]) -> bool {
    let contains = |xs: &[Generator], ys: &[Generator]| {
        ys.iter().all(|y| {
            solve_in_span(y, xs, &non_parameter)
                .map(|c| c.iter().all(|e| !involves_functions(e)))
                .unwrap_or(false)
        })
    };
    contains(a, b) && contains(b, a)
}

/// Antisymmetry and Jacobi identity of a constant table; returns the first failure.
pub fn check_table(c: &[Vec<Vec<Expr>>]) -> std::result::Result<(), String> {
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !c[i][j][k].add(&c[j][i][k]).is_zero() {
                    return Err(format!("antisymmetry fails at ({i},{j},{k})"));
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = Expr::zero();
                    for m in 0..n {
                        s = s
                            .add(&c[i][j][m].mul(&c[m][k][l]))
                            .add(&c[j][k][m].mul(&c[m][i][l]))
                            .add(&c[k][i][m].mul(&c[m][j][l]));
                    }
                    if !s.is_zero() {
                        return Err(format!("Jacobi fails at ({i},{j},{k}) component {l}"));
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct TableReport {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self
            .rows
            .iter()
            .flatten()
            .chain(self.labels.iter())
            .map(|s| s.len())
            .max()
            .unwrap_or(1);
        write!(f, "{:w$} |", "")?;
        for l in &self.labels {
            write!(f, " {l:>w$}")?;
        }
        writeln!(f)?;
        for (l, row) in self.labels.iter().zip(&self.rows) {
            write!(f, "{l:>w$} |")?;
            for e in row {
                write!(f, " {e:>w$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
