//! Canonical rational expressions.
//!
//! An [`Expr`] is always stored in canonical form: `num / den` with
//! `gcd(num, den) = 1` and `den` having leading coefficient one. Two
//! expressions are mathematically equal (in the rational-function sense,
//! with function applications as independent generators) iff they are
//! structurally equal.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::atom::{Atom, AtomKind, Builtin, FuncHead, Symbol};
use super::poly::{Monomial, Poly};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Ratio {
    num: Poly,
    den: Poly,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Ratio>);

/// Removes from `num` every factor it shares with the product of `factors`.
/// Returns the reduced numerator and the product of the reduced factors.
fn cancel(mut num: Poly, factors: Vec<Poly>) -> (Poly, Poly) {
    let mut den = Poly::one();
    for f in factors {
        if f.is_constant() {
            den = den.mul(&f);
            continue;
        }
        let g = num.gcd(&f);
        if g.is_one() {
            den = den.mul(&f);
        } else {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.mul(&f.div_exact(&g).expect("gcd divides factor"));
        }
    }
    (num, den)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Expr {
    fn from_canonical(num: Poly, den: Poly) -> Expr {
        Expr(Arc::new(Ratio { num, den }))
    }

    /// Builds `num / den` where the caller guarantees the two are coprime.
    fn from_coprime(num: Poly, den: Poly) -> Expr {
        if num.is_zero() {
            return Expr::zero();
        }
        let (lm, lc) = den.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let _ = lm;
        if lc.is_one() {
            Expr::from_canonical(num, den)
        } else {
            let inv = lc.recip();
            Expr::from_canonical(num.scale(&inv), den.scale(&inv))
        }
    }

    /// `num / den`, cancelling common factors.
    pub fn from_polys(num: Poly, den: Poly) -> Result<Expr> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        let (n, d) = cancel(num, vec![den]);
        Ok(Expr::from_coprime(n, d))
    }

    pub fn from_poly(p: Poly) -> Expr {
        Expr::from_canonical(p, Poly::one())
    }

    pub fn zero() -> Expr {
        Expr::from_canonical(Poly::zero(), Poly::one())
    }

    pub fn one() -> Expr {
        Expr::from_canonical(Poly::one(), Poly::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(int(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(c: BigRational) -> Expr {
        Expr::from_canonical(Poly::constant(c), Poly::one())
    }

    pub fn var(name: &str) -> Expr {
        Expr::atom(Atom::var(Symbol::new(name)))
    }

    pub fn symbol(sym: &Symbol) -> Expr {
        Expr::atom(Atom::var(sym.clone()))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::from_poly(Poly::from_atom(a))
    }

    /// Application of a built-in transcendental function, with exact values at trivial points.
    pub fn builtin(b: Builtin, arg: Expr) -> Expr {
        if let Some(c) = arg.as_rational() {
            let zero = c.is_zero();
            let one = c.is_one();
            match b {
                Builtin::Sin | Builtin::Tan | Builtin::Sqrt if zero => return Expr::zero(),
                Builtin::Cos | Builtin::Exp if zero => return Expr::one(),
                Builtin::Ln | Builtin::Sqrt if one => {
                    return if b == Builtin::Ln {
                        Expr::zero()
                    } else {
                        Expr::one()
                    }
                }
                _ => {}
            }
        }
        Expr::atom(Atom::func(FuncHead::Builtin(b), vec![arg]))
    }

    /// Application of an arbitrary (formal) function, with derivative orders per argument.
    pub fn formal(name: &str, derivs: Vec<u32>, args: Vec<Expr>) -> Expr {
        assert_eq!(derivs.len(), args.len(), "derivative orders per argument");
        Expr::atom(Atom::func(
            FuncHead::Formal {
                name: Symbol::new(name),
                derivs,
            },
            args,
        ))
    }

    /// `name(args)` with no derivatives.
    pub fn func(name: &str, args: Vec<Expr>) -> Expr {
        let n = args.len();
        Expr::formal(name, vec![0; n], args)
    }

    pub fn num(&self) -> &Poly {
        &self.0.num
    }

    pub fn den(&self) -> &Poly {
        &self.0.den
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.num.is_one() && self.0.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.0.den.is_one() {
            self.0.num.constant_value()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn as_atom(&self) -> Option<Atom> {
        if !self.0.den.is_one() || self.0.num.len() != 1 {
            return None;
        }
        let (m, c) = self.0.num.leading().unwrap();
        if !c.is_one() || m.factors().len() != 1 || m.factors()[0].1 != 1 {
            return None;
        }
        Some(m.factors()[0].0.clone())
    }

    pub fn as_symbol(&self) -> Option<Symbol> {
        self.as_atom().and_then(|a| a.as_var().cloned())
    }

    /// Canonical form; expressions are always stored normalized, so this is the identity.
    pub fn normalize(&self) -> Expr {
        self.clone()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.0.num.atoms();
        s.extend(self.0.den.atoms());
        s
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut s = BTreeSet::new();
        for a in self.atoms() {
            s.extend(a.free_symbols());
        }
        s
    }

    pub fn depends_on(&self, sym: &Symbol) -> bool {
        self.atoms().iter().any(|a| a.depends_on(sym))
    }

    pub fn neg(&self) -> Expr {
        Expr::from_canonical(self.0.num.neg(), self.0.den.clone())
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.0.num, &self.0.den);
        let (c, d) = (&other.0.num, &other.0.den);
        if b.is_one() && d.is_one() {
            return Expr::from_poly(a.add(c));
        }
        if b == d {
            let n = a.add(c);
            let (n, den) = cancel(n, vec![b.clone()]);
            return Expr::from_coprime(n, den);
        }
        let g = b.gcd(d);
        if g.is_one() {
            // coprime denominators: the result is already reduced
            let n = a.mul(d).add(&c.mul(b));
            return Expr::from_coprime(n, b.mul(d));
        }
        let b1 = b.div_exact(&g).unwrap();
        let d1 = d.div_exact(&g).unwrap();
        let n = a.mul(&d1).add(&c.mul(&b1));
        let (n, gg) = cancel(n, vec![g]);
        Expr::from_coprime(n, b1.mul(&d1).mul(&gg))
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = self.as_rational() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_rational() {
            return self.scale(&c);
        }
        let (a, b) = (&self.0.num, &self.0.den);
        let (c, d) = (&other.0.num, &other.0.den);
        if b.is_one() && d.is_one() {
            return Expr::from_poly(a.mul(c));
        }
        let (a1, d1) = cancel(a.clone(), vec![d.clone()]);
        let (c1, b1) = cancel(c.clone(), vec![b.clone()]);
        Expr::from_coprime(a1.mul(&c1), b1.mul(&d1))
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr::from_canonical(self.0.num.scale(c), self.0.den.clone())
    }

    pub fn recip(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        Ok(Expr::from_coprime(self.0.den.clone(), self.0.num.clone()))
    }

    pub fn div(&self, other: &Expr) -> Result<Expr> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, n: i64) -> Result<Expr> {
        if n >= 0 {
            let n = n as u32;
            Ok(Expr::from_canonical(self.0.num.pow(n), self.0.den.pow(n)))
        } else {
            let r = self.recip()?;
            r.pow(-n)
        }
    }

    /// Partial derivative with respect to a variable; function applications obey the chain rule.
    pub fn diff(&self, sym: &Symbol) -> Expr {
        let (n, d) = (&self.0.num, &self.0.den);
        let dn = diff_poly(n, sym);
        if d.is_one() {
            return dn;
        }
        let dd = diff_poly(d, sym);
        if dd.is_zero() {
            return dn.mul(&Expr::from_coprime(Poly::one(), d.clone()));
        }
        // (n' d - n d') / d^2 with n', d' rational in general
        let d_e = Expr::from_poly(d.clone());
        let n_e = Expr::from_poly(n.clone());
        let top = dn.mul(&d_e).sub(&n_e.mul(&dd));
        if top.is_zero() {
            return Expr::zero();
        }
        let (tn, tden) = (top.0.num.clone(), top.0.den.clone());
        let (tn, den) = cancel(tn, vec![d.clone(), d.clone()]);
        Expr::from_coprime(tn, den.mul(&tden))
    }

    pub fn diff_name(&self, name: &str) -> Expr {
        self.diff(&Symbol::new(name))
    }

    /// Derivative treating one atom as an independent variable (other atoms constant).
    pub fn diff_atom(&self, a: &Atom) -> Expr {
        let (n, d) = (&self.0.num, &self.0.den);
        let dn = n.diff_atom(a);
        if d.is_one() {
            return Expr::from_poly(dn);
        }
        let dd = d.diff_atom(a);
        let top = dn.mul(d).sub(&n.mul(&dd));
        let (tn, den) = cancel(top, vec![d.clone(), d.clone()]);
        Expr::from_coprime(tn, den)
    }

    /// Simultaneous substitution of variables. Cycles of length two or more are rejected;
    /// a binding may refer to its own variable (`u := 2*u`).
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr> {
        check_acyclic(bindings)?;
        Ok(self.subs_unchecked(bindings))
    }

    /// Simultaneous substitution without the acyclicity check (changes of variables).
    pub fn subs_unchecked(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut cache: HashMap<Atom, Expr> = HashMap::new();
        self.map_atoms(&mut |a: &Atom| -> Option<Expr> {
            if let Some(e) = cache.get(a) {
                return Some(e.clone());
            }
            let r = subst_atom(a, bindings);
            if let Some(e) = &r {
                cache.insert(a.clone(), e.clone());
            }
            r
        })
    }

    pub fn subs(&self, pairs: &[(&str, Expr)]) -> Expr {
        let m: BTreeMap<Symbol, Expr> = pairs
            .iter()
            .map(|(n, e)| (Symbol::new(n), e.clone()))
            .collect();
        self.subs_unchecked(&m)
    }

    /// Replaces atoms; `f` returns `None` to keep an atom unchanged.
    pub fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Option<Expr>) -> Expr {
        let mut repl: BTreeMap<Atom, Expr> = BTreeMap::new();
        for a in self.atoms() {
            if let Some(e) = f(&a) {
                if e.as_atom().as_ref() != Some(&a) {
                    repl.insert(a, e);
                }
            }
        }
        if repl.is_empty() {
            return self.clone();
        }
        let (nn, nd) = subst_poly(&self.0.num, &repl);
        let (dn, dd) = subst_poly(&self.0.den, &repl);
        if nn.is_zero() {
            return Expr::zero();
        }
        // (nn/nd) / (dn/dd) = nn*dd / (nd*dn)
        let mut num_factors = vec![nn];
        num_factors.extend(dd);
        let mut den_factors = nd;
        den_factors.insert(0, dn);
        assemble(num_factors, den_factors).expect("substituted denominator vanished")
    }

    /// Like [`map_atoms`](Self::map_atoms) but reports a zero denominator as an error.
    pub fn try_map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Option<Expr>) -> Result<Expr> {
        let mut repl: BTreeMap<Atom, Expr> = BTreeMap::new();
        for a in self.atoms() {
            if let Some(e) = f(&a) {
                repl.insert(a, e);
            }
        }
        if repl.is_empty() {
            return Ok(self.clone());
        }
        let (nn, nd) = subst_poly(&self.0.num, &repl);
        let (dn, dd) = subst_poly(&self.0.den, &repl);
        if dn.is_zero() {
            return Err(Error::DivisionByZeroExpr);
        }
        if nn.is_zero() {
            return Ok(Expr::zero());
        }
        let mut num_factors = vec![nn];
        num_factors.extend(dd);
        let mut den_factors = nd;
        den_factors.insert(0, dn);
        assemble(num_factors, den_factors)
    }

    /// Coefficients of `self` as a polynomial in the given variables.
    pub fn collect(&self, vars: &[Symbol]) -> Result<BTreeMap<Monomial, Expr>> {
        let set: BTreeSet<&Symbol> = vars.iter().collect();
        for a in self.0.den.atoms() {
            if a.free_symbols().iter().any(|s| set.contains(s)) {
                return Err(Error::NotPolynomialInVars(format!(
                    "denominator depends on {a}"
                )));
            }
        }
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in self.0.num.terms() {
            let mut key = Vec::new();
            let mut rest = Vec::new();
            for (a, e) in m.factors() {
                match a.kind() {
                    AtomKind::Var(s) if set.contains(s) => key.push((a.clone(), *e)),
                    _ => {
                        if a.free_symbols().iter().any(|s| set.contains(s)) {
                            return Err(Error::NotPolynomialInVars(format!(
                                "{a} is not a monomial in the requested variables"
                            )));
                        }
                        rest.push((a.clone(), *e));
                    }
                }
            }
            out.entry(Monomial::from_factors(key))
                .or_default()
                .add_term(Monomial::from_factors(rest), c.clone());
        }
        let den = Expr::from_coprime(Poly::one(), self.0.den.clone());
        Ok(out
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(m, p)| (m, Expr::from_poly(p).mul(&den)))
            .collect())
    }

    /// Coefficients with respect to arbitrary atoms (variables or function applications).
    pub fn collect_atoms(&self, atoms: &BTreeSet<Atom>) -> Result<BTreeMap<Monomial, Expr>> {
        for a in self.0.den.atoms() {
            if atoms.contains(&a) {
                return Err(Error::NotPolynomialInVars(format!(
                    "denominator depends on {a}"
                )));
            }
        }
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in self.0.num.terms() {
            let mut key = Vec::new();
            let mut rest = Vec::new();
            for (a, e) in m.factors() {
                if atoms.contains(a) {
                    key.push((a.clone(), *e));
                } else {
                    rest.push((a.clone(), *e));
                }
            }
            out.entry(Monomial::from_factors(key))
                .or_default()
                .add_term(Monomial::from_factors(rest), c.clone());
        }
        let den = Expr::from_coprime(Poly::one(), self.0.den.clone());
        Ok(out
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(m, p)| (m, Expr::from_poly(p).mul(&den)))
            .collect())
    }

    pub fn monomial_expr(m: &Monomial) -> Expr {
        Expr::from_poly(Poly::term(BigRational::one(), m.clone()))
    }

    /// Size measure used for heuristics and reports.
    pub fn size(&self) -> usize {
        self.0.num.len() + self.0.den.len()
    }

    /// Approximate value of a constant expression.
    pub fn to_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|c| c.to_f64())
    }

    /// Sign-normalized copy: integer-primitive numerator with positive leading coefficient.
    /// Useful for comparing equations `e = 0` up to a nonzero constant factor.
    pub fn equation_normal_form(&self) -> Expr {
        Expr::from_poly(self.0.num.integer_primitive())
    }

    pub fn is_negative_leading(&self) -> bool {
        self.0.num.leading().is_some_and(|(_, c)| c.is_negative())
    }
}

fn check_acyclic(bindings: &BTreeMap<Symbol, Expr>) -> Result<()> {
    let deps: BTreeMap<&Symbol, BTreeSet<Symbol>> = bindings
        .iter()
        .map(|(k, v)| {
            let mut s = v.free_symbols();
            s.remove(k);
            s.retain(|x| bindings.contains_key(x));
            (k, s)
        })
        .collect();
    // depth-first search for a cycle
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut marks: BTreeMap<&Symbol, Mark> = deps.keys().map(|k| (*k, Mark::New)).collect();
    fn visit<'a>(
        k: &'a Symbol,
        deps: &'a BTreeMap<&'a Symbol, BTreeSet<Symbol>>,
        marks: &mut BTreeMap<&'a Symbol, Mark>,
        stack: &mut Vec<String>,
    ) -> Result<()> {
        match marks[k] {
            Mark::Done => return Ok(()),
            Mark::Active => {
                let start = stack.iter().position(|s| s == k.name()).unwrap_or(0);
                let mut cycle = stack[start..].to_vec();
                cycle.push(k.name().to_string());
                return Err(Error::CyclicBinding(cycle));
            }
            Mark::New => {}
        }
        marks.insert(k, Mark::Active);
        stack.push(k.name().to_string());
        for d in &deps[k] {
            let (dk, _) = deps.get_key_value(d).unwrap();
            visit(dk, deps, marks, stack)?;
        }
        stack.pop();
        marks.insert(k, Mark::Done);
        Ok(())
    }
    let keys: Vec<&Symbol> = deps.keys().copied().collect();
    for k in keys {
        let mut stack = Vec::new();
        visit(k, &deps, &mut marks, &mut stack)?;
    }
    Ok(())
}

fn subst_atom(a: &Atom, bindings: &BTreeMap<Symbol, Expr>) -> Option<Expr> {
    match a.kind() {
        AtomKind::Var(s) => bindings.get(s).cloned(),
        AtomKind::Func { head, args, free } => {
            if !free.iter().any(|s| bindings.contains_key(s)) {
                return None;
            }
            let new_args: Vec<Expr> = args.iter().map(|e| e.subs_unchecked(bindings)).collect();
            Some(apply_head(head, new_args))
        }
    }
}

/// Rebuilds a function application, applying built-in simplifications.
pub fn apply_head(head: &FuncHead, args: Vec<Expr>) -> Expr {
    match head {
        FuncHead::Builtin(b) => Expr::builtin(*b, args.into_iter().next().unwrap()),
        FuncHead::Formal { .. } => Expr::atom(Atom::func(head.clone(), args)),
    }
}

/// Substitutes into a polynomial. Returns the numerator and the list of
/// denominator factors (with multiplicity) of the result.
fn subst_poly(p: &Poly, repl: &BTreeMap<Atom, Expr>) -> (Poly, Vec<Poly>) {
    // maximal degree of each replaced atom with a nontrivial denominator
    let mut degs: BTreeMap<&Atom, u32> = BTreeMap::new();
    for (m, _) in p.terms() {
        for (a, e) in m.factors() {
            if let Some(v) = repl.get(a) {
                if !v.den().is_one() {
                    let d = degs.entry(a).or_insert(0);
                    *d = (*d).max(*e);
                }
            }
        }
    }
    let mut pow_cache: HashMap<(Atom, u32, bool), Poly> = HashMap::new();
    let mut get_pow = |a: &Atom, e: u32, numer: bool| -> Poly {
        if e == 0 {
            return Poly::one();
        }
        let key = (a.clone(), e, numer);
        if let Some(p) = pow_cache.get(&key) {
            return p.clone();
        }
        let v = &repl[a];
        let base = if numer { v.num() } else { v.den() };
        let r = base.pow(e);
        pow_cache.insert(key, r.clone());
        r
    };
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let mut term = Poly::term(c.clone(), Monomial::one());
        let mut keep = Vec::new();
        let mut seen: BTreeSet<&Atom> = BTreeSet::new();
        for (a, e) in m.factors() {
            if repl.contains_key(a) {
                seen.insert(a);
                let mut f = get_pow(a, *e, true);
                if let Some(&dmax) = degs.get(a) {
                    f = f.mul(&get_pow(a, dmax - e, false));
                }
                term = term.mul(&f);
            } else {
                keep.push((a.clone(), *e));
            }
        }
        for (a, &dmax) in &degs {
            if !seen.contains(a) {
                term = term.mul(&get_pow(a, dmax, false));
            }
        }
        if !keep.is_empty() {
            term = term.mul_term(&BigRational::one(), &Monomial::from_factors(keep));
        }
        out = out.add(&term);
    }
    let mut dens = Vec::new();
    for (a, &d) in &degs {
        let base = repl[*a].den().clone();
        for _ in 0..d {
            dens.push(base.clone());
        }
    }
    (out, dens)
}

/// Builds `prod(num_factors) / prod(den_factors)` in canonical form.
fn assemble(num_factors: Vec<Poly>, den_factors: Vec<Poly>) -> Result<Expr> {
    let mut num = Poly::one();
    for f in num_factors {
        num = num.mul(&f);
    }
    if num.is_zero() {
        return Ok(Expr::zero());
    }
    if den_factors.iter().any(|f| f.is_zero()) {
        return Err(Error::DivisionByZeroExpr);
    }
    // cancel identical factors on both sides cheaply first
    let (n, d) = cancel(num, den_factors);
    Ok(Expr::from_coprime(n, d))
}

fn diff_poly(p: &Poly, sym: &Symbol) -> Expr {
    let mut total = Expr::from_poly(Poly::zero());
    let atoms: Vec<Atom> = p.atoms().into_iter().filter(|a| a.depends_on(sym)).collect();
    for a in atoms {
        let partial = p.diff_atom(&a);
        if partial.is_zero() {
            continue;
        }
        let chain = diff_atom_wrt(&a, sym);
        if chain.is_zero() {
            continue;
        }
        total = total.add(&Expr::from_poly(partial).mul(&chain));
    }
    total
}

/// d(atom)/d(sym).
fn diff_atom_wrt(a: &Atom, sym: &Symbol) -> Expr {
    match a.kind() {
        AtomKind::Var(s) => {
            if s == sym {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        AtomKind::Func { head, args, .. } => {
            let mut total = Expr::zero();
            for (i, arg) in args.iter().enumerate() {
                let darg = arg.diff(sym);
                if darg.is_zero() {
                    continue;
                }
                let outer = match head {
                    FuncHead::Builtin(b) => builtin_derivative(*b, arg),
                    FuncHead::Formal { name, derivs } => {
                        let mut d = derivs.clone();
                        d[i] += 1;
                        Expr::atom(Atom::func(
                            FuncHead::Formal {
                                name: name.clone(),
                                derivs: d,
                            },
                            args.clone(),
                        ))
                    }
                };
                total = total.add(&outer.mul(&darg));
            }
            total
        }
    }
}

fn builtin_derivative(b: Builtin, arg: &Expr) -> Expr {
    match b {
        Builtin::Sin => Expr::builtin(Builtin::Cos, arg.clone()),
        Builtin::Cos => Expr::builtin(Builtin::Sin, arg.clone()).neg(),
        Builtin::Tan => {
            let t = Expr::builtin(Builtin::Tan, arg.clone());
            Expr::one().add(&Expr::mul(&t, &t))
        }
        Builtin::Exp => Expr::builtin(Builtin::Exp, arg.clone()),
        Builtin::Ln => arg.recip().unwrap_or_else(|_| Expr::zero()),
        Builtin::Sqrt => {
            let s = Expr::builtin(Builtin::Sqrt, arg.clone());
            s.scale(&int(2)).recip().unwrap_or_else(|_| Expr::zero())
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = &self.0.num;
        let den = &self.0.den;
        if den.is_one() {
            return write!(f, "{num}");
        }
        let num_s = if num.len() > 1 {
            format!("({num})")
        } else {
            format!("{num}")
        };
        let den_s = if den.len() > 1 || den.leading().is_some_and(|(m, c)| !c.is_one() || m.factors().len() > 1) {
            format!("({den})")
        } else {
            format!("{den}")
        };
        // a leading minus on a single-term numerator binds to the whole quotient anyway
        write!(f, "{num_s}/{den_s}")
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<BigRational> for Expr {
    fn from(c: BigRational) -> Self {
        Expr::rational(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$inner(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$inner(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$inner(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$inner(self, &rhs)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}
impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a.add(&b))
    }
}
