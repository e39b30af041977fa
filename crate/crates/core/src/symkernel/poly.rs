//! Sparse multivariate polynomials over ℚ with atoms as generators.
//!
//! Terms are kept in a `BTreeMap` ordered graded-lexicographically, so the
//! leading term is the last entry. The gcd is a recursive primitive
//! pseudo-remainder sequence with fast paths for monomials, constants and
//! operands shown coprime by modular images.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::atom::Atom;

/// Product of atoms with positive exponents, sorted by atom.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    pub fn from_factors(mut factors: Vec<(Atom, u32)>) -> Self {
        factors.retain(|(_, e)| *e > 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, u32)> = Vec::with_capacity(factors.len());
        for (a, e) in factors {
            match out.last_mut() {
                Some((b, f)) if *b == a => *f += e,
                _ => out.push((a, e)),
            }
        }
        Monomial(out)
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// Splits off the power of `a`: returns `(e, rest)` with `self = a^e * rest`.
    pub fn split(&self, a: &Atom) -> (u32, Monomial) {
        let mut e = 0;
        let mut rest = Vec::with_capacity(self.0.len());
        for (b, f) in &self.0 {
            if b == a {
                e = *f;
            } else {
                rest.push((b.clone(), *f));
            }
        }
        (e, Monomial(rest))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *a {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *a {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((a.clone(), e - f)),
                }
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (a, e) in &self.0 {
            let f = other.exponent(a);
            if f > 0 {
                out.push((a.clone(), (*e).min(f)));
            }
        }
        Monomial(out)
    }

    pub fn pow(&self, n: u32) -> Monomial {
        Monomial(self.0.iter().map(|(a, e)| (a.clone(), e * n)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        for (x, y) in self.0.iter().zip(other.0.iter()) {
            match x.0.cmp(&y.0) {
                // self carries an atom that other lacks at this position
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {
                    if x.1 != y.1 {
                        return x.1.cmp(&y.1);
                    }
                }
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}
impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (a, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial over ℚ.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    BigRational::new(n, d)
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn from_atom(a: Atom) -> Self {
        Poly::term(BigRational::one(), Monomial::atom(a, 1))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for (a, _) in m.factors() {
                s.insert(a.clone());
            }
        }
        s
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_term(&self, c: &BigRational, mono: &Monomial) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.mul(mono), d * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Rational content: gcd of all coefficients (positive).
    pub fn numeric_content(&self) -> BigRational {
        let mut it = self.terms.values();
        let Some(first) = it.next() else {
            return BigRational::one();
        };
        let mut g = first.abs();
        for c in it {
            g = rat_gcd(&g, c);
        }
        g
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) => {
                if c.is_one() {
                    self.clone()
                } else {
                    self.scale(&c.recip())
                }
            }
        }
    }

    /// Monomial dividing every term, with maximal exponents.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, mono: &Monomial) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.div(mono)?, c.clone());
        }
        Some(Poly { terms })
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if let Some(c) = other.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        if other.len() == 1 {
            let (m, c) = other.leading().unwrap();
            return self.div_monomial(m).map(|p| p.scale(&c.recip()));
        }
        let (lm, lc) = other.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            for (om, oc) in &other.terms {
                rem.add_term(om.mul(&qm), -(oc * &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Coefficients as a univariate polynomial in `a`; index = power.
    pub fn coeffs_in(&self, a: &Atom) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(a);
            let e = e as usize;
            if out.len() <= e {
                out.resize(e + 1, Poly::zero());
            }
            out[e].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(a: &Atom, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let mono = Monomial::atom(a.clone(), e as u32);
            for (m, k) in &c.terms {
                out.add_term(m.mul(&mono), k.clone());
            }
        }
        out
    }

    /// Content with respect to `a`: gcd of the coefficients in `a`.
    pub fn content_in(&self, a: &Atom) -> Poly {
        let coeffs = self.coeffs_in(a);
        let mut g = Poly::zero();
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            g = if g.is_zero() { c.monic() } else { g.gcd(c) };
            if g.is_constant() {
                return Poly::one();
            }
        }
        g
    }

    fn primitive_in(&self, a: &Atom) -> Poly {
        let c = self.content_in(a);
        if c.is_one() {
            self.monic()
        } else {
            self.div_exact(&c).expect("content divides").monic()
        }
    }

    /// Greatest common divisor, normalized to leading coefficient one.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self == other {
            return self.monic();
        }
        let ma = self.monomial_content();
        let mb = other.monomial_content();
        let mono = ma.gcd(&mb);
        if self.len() == 1 || other.len() == 1 {
            return Poly::term(BigRational::one(), mono);
        }
        let a = self.div_monomial(&ma).unwrap();
        let b = other.div_monomial(&mb).unwrap();
        let g = a.gcd_nomono(&b);
        g.mul_term(&BigRational::one(), &mono).monic()
    }

    fn gcd_nomono(&self, other: &Poly) -> Poly {
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self.len() == 1 || other.len() == 1 {
            return Poly::term(BigRational::one(), self.monomial_content().gcd(&other.monomial_content()));
        }
        if modular::coprime(self, other) {
            return Poly::one();
        }
        // `b` is the smaller operand; the gcd divides it.
        let (a, b) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if let Some(q) = a.div_exact(b) {
            let _ = q;
            return b.monic();
        }
        let atoms_a = a.atoms();
        let common: Vec<Atom> = b.atoms().into_iter().filter(|x| atoms_a.contains(x)).collect();
        if common.is_empty() {
            return Poly::one();
        }
        let x = common
            .iter()
            .min_by_key(|x| (b.degree_in(x), a.degree_in(x)))
            .unwrap()
            .clone();
        let cb = b.content_in(&x);
        let ppb = if cb.is_one() {
            b.clone()
        } else {
            b.div_exact(&cb).expect("content divides")
        };
        let mut cont = cb;
        if !cont.is_one() {
            for c in a.coeffs_in(&x).iter().filter(|c| !c.is_zero()) {
                cont = cont.gcd(c);
                if cont.is_constant() {
                    cont = Poly::one();
                    break;
                }
            }
        }
        let prim = prs_gcd(a.clone(), ppb, &x);
        prim.mul(&cont).monic()
    }

    /// Formal partial derivative with respect to an atom treated as independent.
    pub fn diff_atom(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(a);
            if e > 0 {
                let mono = rest.mul(&Monomial::atom(a.clone(), e - 1));
                out.add_term(mono, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Multiplies through by the lcm of coefficient denominators and divides by the
    /// gcd of numerators, yielding an integer primitive polynomial up to sign.
    pub fn integer_primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.numeric_content();
        let mut p = self.scale(&c.recip());
        if p.leading().is_some_and(|(_, c)| c.is_negative()) {
            p = p.neg();
        }
        p
    }
}

/// Coprimality proof by evaluation modulo a prime.
mod modular {
    use super::*;
    use num_traits::ToPrimitive;

    const P: u64 = (1 << 61) - 1;

    fn mul(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    fn pow(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(a: u64) -> u64 {
        pow(a, P - 2)
    }

    fn reduce(n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(P));
        r.to_u64().expect("reduced below the modulus")
    }

    fn rational(c: &BigRational) -> Option<u64> {
        let d = reduce(c.denom());
        (d != 0).then(|| mul(reduce(c.numer()), inv(d)))
    }

    /// Coefficients in `x` of the image with every other atom replaced by its value.
    fn image(p: &Poly, x: &Atom, vals: &BTreeMap<Atom, u64>) -> Option<Vec<u64>> {
        let mut out = vec![0u64; p.degree_in(x) as usize + 1];
        for (m, c) in &p.terms {
            let mut v = rational(c)?;
            let mut e = 0;
            for (a, k) in m.factors() {
                if a == x {
                    e = *k as usize;
                } else {
                    v = mul(v, pow(vals[a], *k as u64));
                }
            }
            out[e] = (out[e] + v) % P;
        }
        Some(out)
    }

    fn rem(a: &mut Vec<u64>, b: &[u64]) {
        let lb = inv(*b.last().unwrap());
        while a.len() >= b.len() {
            let q = mul(*a.last().unwrap(), lb);
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + P - mul(q, *c)) % P;
            }
            a.pop();
            while a.last() == Some(&0) {
                a.pop();
            }
        }
    }

    fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
        while !b.is_empty() {
            rem(&mut a, &b);
            std::mem::swap(&mut a, &mut b);
        }
        a.len().saturating_sub(1)
    }

    /// True only if the gcd is provably constant: for every shared atom the images at a
    /// point keeping both leading coefficients have a constant gcd, which bounds the
    /// degree of the true gcd in that atom from above.
    pub(super) fn coprime(a: &Poly, b: &Poly) -> bool {
        let atoms_a = a.atoms();
        let atoms: BTreeSet<Atom> = atoms_a.union(&b.atoms()).cloned().collect();
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = move || {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            (z ^ (z >> 31)) % P
        };
        let vals: BTreeMap<Atom, u64> = atoms.iter().map(|a| (a.clone(), next())).collect();
        for x in b.atoms().iter().filter(|x| atoms_a.contains(*x)) {
            let (Some(ia), Some(ib)) = (image(a, x, &vals), image(b, x, &vals)) else {
                return false;
            };
            let (da, db) = (a.degree_in(x) as usize, b.degree_in(x) as usize);
            if ia.len() != da + 1 || ia[da] == 0 || ib[db] == 0 {
                return false;
            }
            if gcd_degree(ia, ib) > 0 {
                return false;
            }
        }
        true
    }
}

fn uni_degree(p: &[Poly]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Pseudo-remainder of `a` by `b` as univariate polynomials in `x`.
fn prem(a: &Poly, b: &Poly, x: &Atom) -> Poly {
    let mut r = a.coeffs_in(x);
    let bc = b.coeffs_in(x);
    let n = uni_degree(&bc).expect("nonzero divisor");
    let lb = bc[n].clone();
    while let Some(m) = uni_degree(&r) {
        if m < n {
            break;
        }
        let lr = r[m].clone();
        let shift = m - n;
        for c in r.iter_mut() {
            *c = c.mul(&lb);
        }
        for (i, c) in bc.iter().enumerate() {
            if !c.is_zero() {
                r[i + shift] = r[i + shift].sub(&c.mul(&lr));
            }
        }
        debug_assert!(r[m].is_zero());
        r.truncate(m);
        // keep coefficient size in check
        let tmp = Poly::from_coeffs_in(x, &r);
        if tmp.is_zero() {
            return tmp;
        }
        let c = tmp.numeric_content();
        if !c.is_one() {
            for p in r.iter_mut() {
                *p = p.scale(&c.recip());
            }
        }
    }
    Poly::from_coeffs_in(x, &r)
}

/// Primitive PRS; returns the primitive (in `x`) gcd of `a` and the primitive `b`.
fn prs_gcd(a: Poly, b: Poly, x: &Atom) -> Poly {
    let (mut f1, mut f2) = if a.degree_in(x) >= b.degree_in(x) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if f2.degree_in(x) == 0 {
            return Poly::one();
        }
        let r = prem(&f1, &f2, x);
        if r.is_zero() {
            return f2.primitive_in(x);
        }
        if r.degree_in(x) == 0 {
            return Poly::one();
        }
        f1 = f2;
        f2 = r.primitive_in(x);
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}
