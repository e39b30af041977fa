//! Reduction of the general map of the case `a35 != 0` to `a11 = 1`, `alpha = 0`.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symkernel::Expr;

use super::catalog::{reflection_map, rotation_map};
use super::{compose, ReciprocalMap};

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub raw: ReciprocalMap,
    pub map: ReciprocalMap,
    pub steps: Vec<String>,
    /// Parameters after normalization.
    pub params: BTreeMap<String, Expr>,
}

#[derive(Serialize)]
pub struct NormalFormSummary {
    pub raw_params: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
    pub steps: Vec<String>,
}

impl NormalForm {
    pub fn summary(&self) -> NormalFormSummary {
        let s = |m: &BTreeMap<String, Expr>| m.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
        NormalFormSummary { raw_params: s(&self.raw.params), params: s(&self.params), steps: self.steps.clone() }
    }
}

fn rational_sqrt(e: &Expr) -> Option<Expr> {
    let q = e.as_rational()?;
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom())
        .then(|| Expr::rational(num_rational::BigRational::new(n, d)))
}

/// Applies the reflection `v -> -v` when `a11 = -1`, then rotates the new velocity
/// and differentials so that `alpha` becomes zero. Needs numeric `a11`, `alpha`,
/// `beta` with `alpha^2 + beta^2` a rational square.
pub fn normal_form(t: &ReciprocalMap) -> Result<NormalForm> {
    let param = |k: &str| {
        t.params
            .get(k)
            .cloned()
            .ok_or_else(|| Error::InvalidParams(format!("map has no parameter {k}")))
    };
    let (a11, alpha, beta) = (param("a11")?, param("alpha")?, param("beta")?);
    let mut steps = Vec::new();
    let mut map = t.clone();
    let mut params = t.params.clone();
    if a11 == Expr::int(-1) {
        map = compose(&reflection_map(), &map);
        steps.push("reflect v' and dy'".to_string());
        params.insert("a11".into(), Expr::one());
    } else if a11 != Expr::one() {
        return Err(Error::InvalidParams(format!("a11 = {a11} is not +-1")));
    }
    if !alpha.is_zero() {
        let r2 = alpha.mul(&alpha).add(&beta.mul(&beta));
        let r = rational_sqrt(&r2)
            .ok_or_else(|| Error::InvalidParams(format!("alpha^2+beta^2 = {r2} is not a rational square")))?;
        let c = beta.div(&r)?;
        let s = alpha.div(&r)?;
        map = compose(&rotation_map(&c, &s)?, &map);
        steps.push(format!("rotate by cos = {c}, sin = {s}"));
        params.insert("alpha".into(), Expr::zero());
        params.insert("beta".into(), r);
    }
    map.name = format!("{}(normal)", t.name);
    map.params = params.clone();
    Ok(NormalForm { raw: t.clone(), map, steps, params })
}
