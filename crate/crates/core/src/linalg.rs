//! Exact dense linear algebra over ℚ and over rational functions, plus a
//! sparse fraction-free eliminator for large integer systems.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::symkernel::Expr;

/// Exact field arithmetic used by the dense routines.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Division by a nonzero element.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Cost used to choose pivots; smaller is preferred.
    fn weight(&self) -> usize {
        1
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn one() -> Self {
        Expr::one()
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Expr::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Expr::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Expr::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Expr::div(self, o).expect("pivot is nonzero")
    }
    fn neg(&self) -> Self {
        Expr::neg(self)
    }
    fn weight(&self) -> usize {
        if self.is_constant() {
            0
        } else {
            self.size()
        }
    }
}

pub type Matrix<T> = Vec<Vec<T>>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<T: Scalar>(m: &mut Matrix<T>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].weight());
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv_pivot = m[r][c].clone();
        for j in c..cols {
            m[r][j] = m[r][j].div(&inv_pivot);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    if !m[r][j].is_zero() {
                        let t = m[i][j].sub(&f.mul(&m[r][j]));
                        m[i][j] = t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the right nullspace `{x : m x = 0}`.
pub fn nullspace<T: Scalar>(m: &Matrix<T>, cols: usize) -> Vec<Vec<T>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![T::zero(); cols];
        v[free] = T::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = a[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Solves `m x = b`; returns one solution or `None` if inconsistent.
pub fn solve<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut aug: Matrix<T> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![T::zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Some(x)
}

/// Determinant by elimination.
pub fn det<T: Scalar>(m: &Matrix<T>) -> T {
    let n = m.len();
    let mut a = m.clone();
    let mut d = T::one();
    for c in 0..n {
        let best = (c..n)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].weight());
        let Some(p) = best else { return T::zero() };
        if p != c {
            a.swap(p, c);
            d = d.neg();
        }
        let piv = a[c][c].clone();
        d = d.mul(&piv);
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = a[i][c].div(&piv);
                for j in c..n {
                    let t = a[i][j].sub(&f.mul(&a[c][j]));
                    a[i][j] = t;
                }
            }
        }
    }
    d
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let n = m.len();
    let mut aug: Matrix<T> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { T::one() } else { T::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = T::zero();
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            s = s.add(&a[i][t].mul(&b[t][j]));
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Sparse row over ℤ: column → nonzero coefficient.
pub type SparseRow = BTreeMap<usize, BigInt>;

fn primitive(row: &mut SparseRow) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

/// Incremental fraction-free Gaussian elimination over ℤ.
///
/// Rows are reduced against the current echelon basis when inserted, so the
/// basis stays small even when many redundant equations are fed in.
#[derive(Default)]
pub struct SparseEliminator {
    /// pivot column → row with that leading column
    rows: BTreeMap<usize, SparseRow>,
}

impl SparseEliminator {
    pub fn new() -> Self {
        SparseEliminator::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut row: SparseRow) -> SparseRow {
        loop {
            let target = row
                .iter()
                .map(|(c, _)| *c)
                .find(|c| self.rows.contains_key(c));
            let Some(c) = target else { return row };
            let piv = &self.rows[&c];
            let a = row[&c].clone();
            let b = piv[&c].clone();
            let g = a.gcd(&b);
            let fa = &b / &g;
            let fb = &a / &g;
            let mut out = SparseRow::new();
            for (k, v) in &row {
                out.insert(*k, v * &fa);
            }
            for (k, v) in piv {
                let e = out.entry(*k).or_insert_with(BigInt::zero);
                *e -= v * &fb;
            }
            out.retain(|_, v| !v.is_zero());
            primitive(&mut out);
            row = out;
        }
    }

    /// Adds an equation; returns whether it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut row = row;
        row.retain(|_, v| !v.is_zero());
        primitive(&mut row);
        let r = self.reduce(row);
        if let Some((&c, _)) = r.iter().next() {
            self.rows.insert(c, r);
            true
        } else {
            false
        }
    }

    /// Nullspace basis over ℚ for `cols` unknowns.
    pub fn nullspace(&self, cols: usize) -> Vec<Vec<BigRational>> {
        // back-substitute into reduced echelon form
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        let mut reduced: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
        for &pc in pivots.iter().rev() {
            let row = &self.rows[&pc];
            let lead = BigRational::from_integer(row[&pc].clone());
            let mut r: BTreeMap<usize, BigRational> = BTreeMap::new();
            for (k, v) in row {
                if *k == pc {
                    continue;
                }
                let val = BigRational::from_integer(v.clone()) / &lead;
                if let Some(sub) = reduced.get(k) {
                    // x_k = -sum sub[j] x_j, so val*x_k contributes -val*sub[j]
                    for (j, s) in sub {
                        let e = r.entry(*j).or_insert_with(<BigRational as Zero>::zero);
                        *e -= &val * s;
                    }
                } else {
                    let e = r.entry(*k).or_insert_with(<BigRational as Zero>::zero);
                    *e += val;
                }
            }
            r.retain(|_, v| !Zero::is_zero(v));
            // x_pc = -sum r[j] x_j over free columns
            reduced.insert(pc, r);
        }
        let mut basis = Vec::new();
        for free in (0..cols).filter(|c| !self.rows.contains_key(c)) {
            let mut v = vec![<BigRational as Zero>::zero(); cols];
            v[free] = <BigRational as One>::one();
            for (&pc, r) in &reduced {
                if let Some(c) = r.get(&free) {
                    v[pc] = -c;
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Normalizes a rational vector to coprime integers with positive first nonzero entry.
pub fn integer_direction(v: &[BigRational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() {
        for x in ints.iter_mut() {
            *x /= &g;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in ints.iter_mut() {
            *x = -x.clone();
        }
    }
    ints
}
