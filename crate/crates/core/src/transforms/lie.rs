//! One-parameter families of reciprocal maps and numeric checks of their group properties.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::Generator;
use crate::symkernel::vars::FIELDS;
use crate::symkernel::{eval_hp, Expr, Symbol};

use super::verify::DEFAULT_SEED;
use super::{compose, ReciprocalMap};

/// A map depending on `eps`, possibly through a transcendental leaf: the stored
/// map is written in the leaf symbol, which is replaced by its value at `eps`.
#[derive(Clone, Debug)]
pub struct OneParamFamily {
    pub name: String,
    pub map: ReciprocalMap,
    pub leaf: Option<(String, Expr)>,
    pub generator: Generator,
}

impl OneParamFamily {
    pub fn new(name: &str, map: ReciprocalMap, leaf: Option<(&str, Expr)>, generator: Generator) -> Self {
        OneParamFamily {
            name: name.into(),
            map,
            leaf: leaf.map(|(s, e)| (s.to_string(), e)),
            generator,
        }
    }

    /// The member with parameter `eps`.
    pub fn at(&self, eps: &Expr) -> ReciprocalMap {
        let mut pairs = vec![("eps", eps.clone())];
        if let Some((s, e)) = &self.leaf {
            pairs.push((s.as_str(), e.subs(&[("eps", eps.clone())])));
        }
        let mut m = self.map.map_exprs(|e| e.subs(&pairs));
        m.name = format!("{}({eps})", self.name);
        m
    }

    /// Values for the parameters of the family, with `subs` semantics.
    pub fn subs_params(&self, values: &[(&str, Expr)]) -> OneParamFamily {
        OneParamFamily {
            name: self.name.clone(),
            map: self.map.subs_params(values),
            leaf: self.leaf.as_ref().map(|(s, e)| (s.clone(), e.subs(values))),
            generator: self.generator.subs(values),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleConfig {
    pub samples: usize,
    pub seed: u64,
    /// Finite-difference step as `1/step_inv`.
    pub step_inv: u64,
    pub bits: u32,
    /// Samples where a denominator is smaller than `1/den_floor_inv` in size are rejected.
    pub den_floor_inv: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { samples: 100, seed: DEFAULT_SEED, step_inv: 1_000_000, bits: 256, den_floor_inv: 10 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LieReport {
    pub family: String,
    pub seed: u64,
    pub accepted: usize,
    pub rejected: usize,
    /// Maximum over samples, slot by slot: five fields, then the form row by row.
    pub per_slot: Vec<f64>,
    pub max_residual: f64,
    /// The same maximum with the plain two-point central difference.
    pub second_order_residual: f64,
    pub identity_at_zero: bool,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn uniform(rng: &mut ChaCha8Rng, lo: BigRational, hi: BigRational) -> BigRational {
    let k: i64 = rng.gen_range(0..=10_000);
    &lo + (&hi - &lo) * rat(k, 10_000)
}

/// A sample point: fields drawn per the fixed ranges, other symbols in `[1/2, 2]`.
fn sample_point(rng: &mut ChaCha8Rng, extra: &[Symbol]) -> BTreeMap<Symbol, BigRational> {
    let mut m = BTreeMap::new();
    let half = || rat(1, 2);
    m.insert(Symbol::new("rho"), uniform(rng, half(), rat(2, 1)));
    m.insert(Symbol::new("p"), uniform(rng, half(), rat(2, 1)));
    m.insert(Symbol::new("S"), uniform(rng, half(), rat(2, 1)));
    let u = loop {
        let u = uniform(rng, rat(-2, 1), rat(2, 1));
        if u.abs() >= rat(1, 10) {
            break u;
        }
    };
    m.insert(Symbol::new("u"), u);
    m.insert(Symbol::new("v"), uniform(rng, rat(-2, 1), rat(2, 1)));
    m.insert(Symbol::new("eps"), uniform(rng, rat(-1, 4), rat(1, 4)));
    for s in extra {
        m.insert(s.clone(), uniform(rng, half(), rat(2, 1)));
    }
    m
}

fn slots(m: &ReciprocalMap) -> Vec<Expr> {
    m.fields.iter().chain(m.form.iter().flatten()).cloned().collect()
}

/// Free symbols that are neither fields nor `eps`.
fn parameters(exprs: &[Expr]) -> Vec<Symbol> {
    let mut out = std::collections::BTreeSet::new();
    for e in exprs {
        for s in e.free_symbols() {
            if !FIELDS.contains(&s.name()) && s.name() != "eps" {
                out.insert(s);
            }
        }
    }
    out.into_iter().collect()
}

fn no_formal(exprs: &[Expr]) -> Result<()> {
    if exprs.iter().any(|e| e.atoms().iter().any(|a| a.is_formal())) {
        return Err(Error::NumericDomain("formal functions cannot be sampled".into()));
    }
    Ok(())
}

/// Denominators at the point stay away from zero.
fn regular(exprs: &[Expr], vars: &BTreeMap<Symbol, BigRational>, cfg: &SampleConfig) -> bool {
    let floor = rat(1, cfg.den_floor_inv as i64);
    exprs.iter().all(|e| {
        let d = Expr::from_poly(e.den().clone());
        matches!(eval_hp(&d, vars, cfg.bits), Ok(v) if v.abs() >= floor)
    })
}

fn eval_all(exprs: &[Expr], vars: &BTreeMap<Symbol, BigRational>, bits: u32) -> Result<Vec<BigRational>> {
    exprs.iter().map(|e| eval_hp(e, vars, bits)).collect()
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Compares `d/deps fam(eps)` with the generator at `fam(eps)`: `zeta(f(eps))` for the
/// fields and `M(f(eps)) f(eps)` for the form. The derivative uses the five-point central
/// stencil; the two-point value is reported alongside, its truncation error grows with
/// the third derivative, which is large near the singular sets.
pub fn lie_equation_check(fam: &OneParamFamily, cfg: &SampleConfig) -> Result<LieReport> {
    let eps = Symbol::new("eps");
    // the map stays written in the leaf symbol, whose value is computed once per point
    let mut map = fam.map.map_exprs(|e| e.clone());
    map.name = fam.name.clone();
    let map_slots = slots(&map);
    let gen_slots: Vec<Expr> = fam.generator.slots().to_vec();
    no_formal(&map_slots)?;
    no_formal(&gen_slots)?;
    let leaf = fam.leaf.as_ref().map(|(s, e)| (Symbol::new(s), e.clone()));
    let mut all = map_slots.clone();
    all.extend(gen_slots.iter().cloned());
    if let Some((_, e)) = &leaf {
        all.push(e.clone());
    }
    let extra: Vec<Symbol> = parameters(&all)
        .into_iter()
        .filter(|s| leaf.as_ref().is_none_or(|(l, _)| l != s))
        .collect();
    let with_leaf = |mut q: BTreeMap<Symbol, BigRational>| -> Result<BTreeMap<Symbol, BigRational>> {
        if let Some((l, e)) = &leaf {
            let v = eval_hp(e, &q, cfg.bits)?;
            q.insert(l.clone(), v);
        }
        Ok(q)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h = rat(1, cfg.step_inv as i64);
    let mut per_slot = vec![0f64; 9];
    let mut second = 0f64;
    let (mut accepted, mut rejected) = (0, 0);
    while accepted < cfg.samples {
        if rejected > 10 * cfg.samples {
            return Err(Error::NumericDomain(format!(
                "{}: too many singular samples ({rejected})",
                fam.name
            )));
        }
        let raw = sample_point(&mut rng, &extra);
        let e0 = raw[&eps].clone();
        let shifted = |d: &BigRational| {
            let mut q = raw.clone();
            q.insert(eps.clone(), &e0 + d);
            with_leaf(q)
        };
        let h2 = &h * BigInt::from(2);
        let point = with_leaf(raw.clone())?;
        let stencil = [shifted(&h2)?, shifted(&h)?, shifted(&-&h)?, shifted(&-&h2)?];
        if !regular(&map_slots, &point, cfg) || !stencil.iter().all(|q| regular(&map_slots, q, cfg)) {
            rejected += 1;
            continue;
        }
        let at = eval_all(&map_slots, &point, cfg.bits)?;
        let f: Vec<Vec<BigRational>> = stencil
            .iter()
            .map(|q| eval_all(&map_slots, q, cfg.bits))
            .collect::<Result<_>>()?;
        // generator evaluated at the transformed fields
        let mut image = point.clone();
        for (f, v) in FIELDS.iter().zip(&at) {
            image.insert(Symbol::new(f), v.clone());
        }
        if !regular(&gen_slots, &image, cfg) {
            rejected += 1;
            continue;
        }
        let g = eval_all(&gen_slots, &image, cfg.bits)?;
        let mut rhs: Vec<BigRational> = g[..5].to_vec();
        for r in 0..2 {
            for c in 0..2 {
                let v = &g[5 + 2 * r] * &at[5 + c] + &g[5 + 2 * r + 1] * &at[5 + 2 + c];
                rhs.push(v);
            }
        }
        for k in 0..9 {
            let eight = BigRational::from_integer(BigInt::from(8));
            let fd4 = (&f[3][k] - &f[0][k] + eight * (&f[1][k] - &f[2][k])) / (&h * BigInt::from(12));
            let fd2 = (&f[1][k] - &f[2][k]) / &h2;
            per_slot[k] = per_slot[k].max(to_f64(&(fd4 - &rhs[k]).abs()));
            second = second.max(to_f64(&(fd2 - &rhs[k]).abs()));
        }
        accepted += 1;
    }
    let zero = fam.at(&Expr::zero());
    Ok(LieReport {
        family: fam.name.clone(),
        seed: cfg.seed,
        accepted,
        rejected,
        max_residual: per_slot.iter().cloned().fold(0.0, f64::max),
        second_order_residual: second,
        per_slot,
        identity_at_zero: zero.is_identity(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionReport {
    pub family: String,
    pub seed: u64,
    pub accepted: usize,
    pub rejected: usize,
    pub max_difference: f64,
}

/// Compares `T(e1) after T(e2)` with `T(e1 + e2)` at random points and parameters.
pub fn composition_check(fam: &OneParamFamily, cfg: &SampleConfig) -> Result<CompositionReport> {
    let (e1, e2) = (Expr::var("eps1"), Expr::var("eps2"));
    let composed = slots(&compose(&fam.at(&e1), &fam.at(&e2)));
    let direct = slots(&fam.at(&e1.add(&e2)));
    no_formal(&composed)?;
    let mut all = composed.clone();
    all.extend(direct.iter().cloned());
    let extra: Vec<Symbol> = parameters(&all)
        .into_iter()
        .filter(|s| s.name() != "eps1" && s.name() != "eps2")
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut accepted, mut rejected) = (0, 0);
    let mut worst = 0f64;
    while accepted < cfg.samples {
        if rejected > 10 * cfg.samples {
            return Err(Error::NumericDomain(format!("{}: too many singular samples", fam.name)));
        }
        let mut point = sample_point(&mut rng, &extra);
        let a = point.remove(&Symbol::new("eps")).unwrap_or_else(BigRational::zero);
        let b = uniform(&mut rng, rat(-1, 4), rat(1, 4));
        point.insert(Symbol::new("eps1"), a);
        point.insert(Symbol::new("eps2"), b);
        if !regular(&composed, &point, cfg) || !regular(&direct, &point, cfg) {
            rejected += 1;
            continue;
        }
        let x = eval_all(&composed, &point, cfg.bits)?;
        let y = eval_all(&direct, &point, cfg.bits)?;
        for (p, q) in x.iter().zip(&y) {
            worst = worst.max(to_f64(&(p - q).abs()));
        }
        accepted += 1;
    }
    Ok(CompositionReport {
        family: fam.name.clone(),
        seed: cfg.seed,
        accepted,
        rejected,
        max_difference: worst,
    })
}
