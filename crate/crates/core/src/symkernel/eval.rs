//! Numeric and exact evaluation.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::atom::{Atom, AtomKind, FuncHead, Symbol};
use super::expr::Expr;
use super::poly::Poly;
use crate::error::{Error, Result};

pub type NativeFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Implementation of a formal function for numeric evaluation.
#[derive(Clone)]
pub enum FnImpl {
    /// `name(params) = body`; derivatives are obtained by differentiating the body.
    Expr { params: Vec<Symbol>, body: Expr },
    /// Native closure for one derivative pattern.
    Native(NativeFn),
}

impl FnImpl {
    pub fn expr(params: &[&str], body: Expr) -> FnImpl {
        FnImpl::Expr {
            params: params.iter().map(|p| Symbol::new(p)).collect(),
            body,
        }
    }

    pub fn native(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> FnImpl {
        FnImpl::Native(Arc::new(f))
    }
}

/// Registry of formal-function implementations.
#[derive(Clone, Default)]
pub struct FnImpls {
    by_name: HashMap<String, FnImpl>,
    /// Natives registered for a specific derivative pattern.
    derived: HashMap<(String, Vec<u32>), NativeFn>,
}

impl FnImpls {
    pub fn new() -> Self {
        FnImpls::default()
    }

    pub fn with(mut self, name: &str, f: FnImpl) -> Self {
        self.insert(name, f);
        self
    }

    pub fn insert(&mut self, name: &str, f: FnImpl) {
        self.by_name.insert(name.to_string(), f);
    }

    pub fn insert_derivative(&mut self, name: &str, derivs: Vec<u32>, f: NativeFn) {
        self.derived.insert((name.to_string(), derivs), f);
    }

    /// Resolves `name` with derivative orders to something callable.
    fn resolve(&self, name: &str, derivs: &[u32]) -> Result<Resolved> {
        if let Some(f) = self.derived.get(&(name.to_string(), derivs.to_vec())) {
            return Ok(Resolved::Native(f.clone()));
        }
        match self.by_name.get(name) {
            None => Err(Error::UnboundSymbol(name.to_string())),
            Some(FnImpl::Native(f)) => {
                if derivs.iter().all(|&d| d == 0) {
                    Ok(Resolved::Native(f.clone()))
                } else {
                    Err(Error::UnboundSymbol(format!(
                        "{name} with derivative orders {derivs:?}"
                    )))
                }
            }
            Some(FnImpl::Expr { params, body }) => {
                if params.len() != derivs.len() {
                    return Err(Error::UnboundSymbol(format!(
                        "{name} expects {} arguments",
                        params.len()
                    )));
                }
                let mut b = body.clone();
                for (p, &d) in params.iter().zip(derivs) {
                    for _ in 0..d {
                        b = b.diff(p);
                    }
                }
                Ok(Resolved::Body {
                    params: params.clone(),
                    body: b,
                })
            }
        }
    }
}

enum Resolved {
    Native(NativeFn),
    Body { params: Vec<Symbol>, body: Expr },
}

fn coeff_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

fn check(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NumericDomain(format!("non-finite value in {what}")))
    }
}

/// Evaluates an expression in double precision.
pub fn eval_numeric(e: &Expr, assignment: &HashMap<String, f64>, fns: &FnImpls) -> Result<f64> {
    let mut cache: HashMap<Atom, f64> = HashMap::new();
    eval_inner(e, assignment, fns, &mut cache)
}

fn eval_inner(
    e: &Expr,
    assignment: &HashMap<String, f64>,
    fns: &FnImpls,
    cache: &mut HashMap<Atom, f64>,
) -> Result<f64> {
    let den = eval_poly(e.den(), assignment, fns, cache)?;
    if den == 0.0 {
        return Err(Error::NumericDomain(format!("zero denominator in {e}")));
    }
    let num = eval_poly(e.num(), assignment, fns, cache)?;
    check(num / den, "quotient")
}

fn eval_poly(
    p: &Poly,
    assignment: &HashMap<String, f64>,
    fns: &FnImpls,
    cache: &mut HashMap<Atom, f64>,
) -> Result<f64> {
    let mut total = 0.0;
    for (m, c) in p.terms() {
        let mut t = coeff_f64(c);
        for (a, e) in m.factors() {
            let v = eval_atom(a, assignment, fns, cache)?;
            t *= v.powi(*e as i32);
        }
        total += t;
    }
    check(total, "polynomial")
}

fn eval_atom(
    a: &Atom,
    assignment: &HashMap<String, f64>,
    fns: &FnImpls,
    cache: &mut HashMap<Atom, f64>,
) -> Result<f64> {
    if let Some(v) = cache.get(a) {
        return Ok(*v);
    }
    let v = match a.kind() {
        AtomKind::Var(s) => *assignment
            .get(s.name())
            .ok_or_else(|| Error::UnboundSymbol(s.name().to_string()))?,
        AtomKind::Func { head, args, .. } => {
            let vals: Vec<f64> = args
                .iter()
                .map(|x| eval_inner(x, assignment, fns, cache))
                .collect::<Result<_>>()?;
            match head {
                FuncHead::Builtin(b) => check(b.apply(vals[0]), b.name())?,
                FuncHead::Formal { name, derivs } => match fns.resolve(name.name(), derivs)? {
                    Resolved::Native(f) => check(f(&vals), name.name())?,
                    Resolved::Body { params, body } => {
                        let local: HashMap<String, f64> = params
                            .iter()
                            .map(|p| p.name().to_string())
                            .zip(vals)
                            .collect();
                        eval_numeric(&body, &local, fns)?
                    }
                },
            }
        }
    };
    cache.insert(a.clone(), v);
    Ok(v)
}

/// Exact evaluation at a rational point. Function applications are valued by `atom_value`
/// when it returns `Some`, otherwise evaluated through their arguments when possible.
pub fn eval_exact(
    e: &Expr,
    vars: &BTreeMap<Symbol, BigRational>,
    atom_value: &dyn Fn(&Atom) -> Option<BigRational>,
) -> Result<BigRational> {
    let den = eval_poly_exact(e.den(), vars, atom_value)?;
    if den.is_zero() {
        return Err(Error::NumericDomain(format!("zero denominator in {e}")));
    }
    Ok(eval_poly_exact(e.num(), vars, atom_value)? / den)
}

fn eval_poly_exact(
    p: &Poly,
    vars: &BTreeMap<Symbol, BigRational>,
    atom_value: &dyn Fn(&Atom) -> Option<BigRational>,
) -> Result<BigRational> {
    let mut total = BigRational::zero();
    let mut cache: HashMap<Atom, BigRational> = HashMap::new();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (a, e) in m.factors() {
            let v = match cache.get(a) {
                Some(v) => v.clone(),
                None => {
                    let v = match (atom_value(a), a.kind()) {
                        (Some(v), _) => v,
                        (None, AtomKind::Var(s)) => vars
                            .get(s)
                            .cloned()
                            .ok_or_else(|| Error::UnboundSymbol(s.name().to_string()))?,
                        (None, AtomKind::Func { .. }) => {
                            return Err(Error::UnboundSymbol(a.to_string()))
                        }
                    };
                    cache.insert(a.clone(), v.clone());
                    v
                }
            };
            t *= num_traits::pow(v, *e as usize);
        }
        total += t;
    }
    Ok(total)
}

enum Slot {
    Input(usize),
    Builtin(super::atom::Builtin, Box<Compiled>),
    Native(NativeFn, Vec<Compiled>),
    Body(Box<Compiled>, Vec<Compiled>),
}

struct CPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CPoly {
    fn eval(&self, atoms: &[f64]) -> f64 {
        let mut s = 0.0;
        for (c, fs) in &self.terms {
            let mut t = *c;
            for &(i, e) in fs {
                t *= if e == 1 { atoms[i] } else { atoms[i].powi(e) };
            }
            s += t;
        }
        s
    }
}

/// Expression compiled against a fixed variable order, for repeated evaluation.
pub struct Compiled {
    slots: Vec<Slot>,
    num: CPoly,
    den: CPoly,
    den_is_one: bool,
}

impl Compiled {
    pub fn new(e: &Expr, inputs: &[Symbol], fns: &FnImpls) -> Result<Compiled> {
        let mut index: BTreeMap<Atom, usize> = BTreeMap::new();
        let mut slots = Vec::new();
        for a in e.atoms() {
            let slot = match a.kind() {
                AtomKind::Var(s) => Slot::Input(
                    inputs
                        .iter()
                        .position(|x| x == s)
                        .ok_or_else(|| Error::UnboundSymbol(s.name().to_string()))?,
                ),
                AtomKind::Func { head, args, .. } => {
                    let cargs: Vec<Compiled> = args
                        .iter()
                        .map(|x| Compiled::new(x, inputs, fns))
                        .collect::<Result<_>>()?;
                    match head {
                        FuncHead::Builtin(b) => {
                            Slot::Builtin(*b, Box::new(cargs.into_iter().next().unwrap()))
                        }
                        FuncHead::Formal { name, derivs } => {
                            match fns.resolve(name.name(), derivs)? {
                                Resolved::Native(f) => Slot::Native(f, cargs),
                                Resolved::Body { params, body } => {
                                    Slot::Body(Box::new(Compiled::new(&body, &params, fns)?), cargs)
                                }
                            }
                        }
                    }
                }
            };
            index.insert(a.clone(), slots.len());
            slots.push(slot);
        }
        let compile = |p: &Poly| CPoly {
            terms: p
                .terms()
                .map(|(m, c)| {
                    (
                        coeff_f64(c),
                        m.factors().iter().map(|(a, e)| (index[a], *e as i32)).collect(),
                    )
                })
                .collect(),
        };
        Ok(Compiled {
            num: compile(e.num()),
            den: compile(e.den()),
            den_is_one: e.den().is_one(),
            slots,
        })
    }

    pub fn eval(&self, inputs: &[f64]) -> Result<f64> {
        let mut atoms = Vec::with_capacity(self.slots.len());
        for s in &self.slots {
            let v = match s {
                Slot::Input(i) => inputs[*i],
                Slot::Builtin(b, arg) => b.apply(arg.eval(inputs)?),
                Slot::Native(f, args) => {
                    let vals: Vec<f64> = args.iter().map(|a| a.eval(inputs)).collect::<Result<_>>()?;
                    f(&vals)
                }
                Slot::Body(body, args) => {
                    let vals: Vec<f64> = args.iter().map(|a| a.eval(inputs)).collect::<Result<_>>()?;
                    body.eval(&vals)?
                }
            };
            atoms.push(v);
        }
        let n = self.num.eval(&atoms);
        let v = if self.den_is_one {
            n
        } else {
            let d = self.den.eval(&atoms);
            if d == 0.0 {
                return Err(Error::NumericDomain("zero denominator".into()));
            }
            n / d
        };
        check(v, "compiled expression")
    }
}

/// Exact evaluation where the transcendental leaves are approximated by
/// rationals within `2^-bits`. Formal functions are not supported.
///
/// Used where finite differences of the result must not be swamped by
/// rounding, e.g. differentiating a one-parameter family in its parameter.
pub fn eval_hp(e: &Expr, vars: &BTreeMap<Symbol, BigRational>, bits: u32) -> Result<BigRational> {
    let lookup = |a: &Atom| -> Option<BigRational> {
        match a.kind() {
            AtomKind::Func {
                head: FuncHead::Builtin(b),
                args,
                ..
            } => {
                let x = eval_hp(&args[0], vars, bits).ok()?;
                hp::apply(*b, &x, bits).ok()
            }
            _ => None,
        }
    };
    eval_exact(e, vars, &lookup)
}

mod hp {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, ToPrimitive, Zero};

    use super::super::atom::Builtin;
    use crate::error::{Error, Result};

    fn round(x: &BigRational, bits: u32) -> BigRational {
        let scale = BigInt::one() << bits;
        let n = (x * BigRational::from_integer(scale.clone())).round().to_integer();
        BigRational::new(n, scale)
    }

    fn tol(bits: u32) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << (bits + 8))
    }

    fn halvings(x: &BigRational) -> u32 {
        let mut k = 0;
        let mut m = x.abs();
        let half = BigRational::new(1.into(), 2.into());
        while m > half {
            m /= BigRational::from_integer(2.into());
            k += 1;
        }
        k
    }

    fn exp(x: &BigRational, bits: u32) -> BigRational {
        let k = halvings(x);
        let w = bits + 2 * k + 16;
        let y = x / BigRational::from_integer(BigInt::one() << k);
        let mut sum = BigRational::one();
        let mut term = BigRational::one();
        let eps = tol(w);
        let mut n = 1;
        while term.abs() > eps {
            term = round(&(&term * &y / BigRational::from_integer(n.into())), w);
            sum += &term;
            n += 1;
        }
        for _ in 0..k {
            sum = round(&(&sum * &sum), w);
        }
        round(&sum, bits + 8)
    }

    fn sin_cos(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
        let k = halvings(x);
        let w = bits + 2 * k + 16;
        let y = x / BigRational::from_integer(BigInt::one() << k);
        let eps = tol(w);
        let (mut s, mut c) = (BigRational::zero(), BigRational::zero());
        let mut term = BigRational::one();
        let mut n: i64 = 0;
        while n < 4 || term.abs() > eps {
            match n % 4 {
                0 => c += &term,
                1 => s += &term,
                2 => c -= &term,
                _ => s -= &term,
            }
            n += 1;
            term = round(&(&term * &y / BigRational::from_integer(n.into())), w);
        }
        for _ in 0..k {
            let s2 = round(&(BigRational::from_integer(2.into()) * &s * &c), w);
            let c2 = round(&(&c * &c - &s * &s), w);
            s = s2;
            c = c2;
        }
        (round(&s, bits + 8), round(&c, bits + 8))
    }

    fn ln(x: &BigRational, bits: u32) -> Result<BigRational> {
        if !x.is_positive() {
            return Err(Error::NumericDomain("ln of a non-positive value".into()));
        }
        // ln x = 2 atanh((x-1)/(x+1)), after scaling x into [1/2, 2]
        let two = BigRational::from_integer(2.into());
        let mut m = x.clone();
        let mut k: i64 = 0;
        while m > two {
            m /= &two;
            k += 1;
        }
        while m < BigRational::new(1.into(), 2.into()) {
            m *= &two;
            k -= 1;
        }
        let w = bits + 24;
        let atanh2 = |z: BigRational| -> BigRational {
            let z2 = &z * &z;
            let mut term = z;
            let mut sum = BigRational::zero();
            let mut n: i64 = 1;
            let eps = tol(w);
            while term.abs() > eps {
                sum += &term / BigRational::from_integer(n.into());
                term = round(&(&term * &z2), w);
                n += 2;
            }
            sum * &two
        };
        let one = BigRational::one();
        let lm = atanh2((&m - &one) / (&m + &one));
        let l2 = atanh2(BigRational::new(1.into(), 3.into()));
        Ok(round(&(lm + l2 * BigRational::from_integer(k.into())), bits + 8))
    }

    fn sqrt(x: &BigRational, bits: u32) -> Result<BigRational> {
        if x.is_negative() {
            return Err(Error::NumericDomain("sqrt of a negative value".into()));
        }
        if x.is_zero() {
            return Ok(BigRational::zero());
        }
        let start = x.to_f64().unwrap_or(1.0).sqrt();
        let mut y = BigRational::from_float(start).unwrap_or_else(BigRational::one);
        let w = bits + 16;
        let two = BigRational::from_integer(2.into());
        for _ in 0..8 {
            y = round(&((&y + x / &y) / &two), w);
        }
        Ok(round(&y, bits + 8))
    }

    pub fn apply(b: Builtin, x: &BigRational, bits: u32) -> Result<BigRational> {
        Ok(match b {
            Builtin::Exp => exp(x, bits),
            Builtin::Sin => sin_cos(x, bits).0,
            Builtin::Cos => sin_cos(x, bits).1,
            Builtin::Tan => {
                let (s, c) = sin_cos(x, bits + 8);
                if c.is_zero() {
                    return Err(Error::NumericDomain("tan at a pole".into()));
                }
                round(&(s / c), bits + 8)
            }
            Builtin::Ln => ln(x, bits)?,
            Builtin::Sqrt => sqrt(x, bits)?,
        })
    }
}
