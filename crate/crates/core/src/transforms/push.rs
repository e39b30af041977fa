//! Images of generators under a reciprocal map and their coordinates in a basis.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::liealg::automorphism::AutomorphismMatrix;
use crate::liealg::generator::{form_add, form_inverse, form_map, form_mul};
use crate::liealg::span::{combine, non_parameter, solve_in_span};
use crate::liealg::Generator;
use crate::symkernel::vars::FIELDS;
use crate::symkernel::{Expr, Symbol};

use super::{solve_inverse, ReciprocalMap};

/// `g` with its coefficients evaluated at the new fields.
pub fn image_of(t: &ReciprocalMap, g: &Generator) -> Generator {
    g.map(|e| t.apply_to(e))
}

/// `T_* X` as a function of the old variables: `zeta' = X(T)`, and for the
/// differentials `M' = (X(f) + f M) f^-1`.
pub fn pushforward_raw(t: &ReciprocalMap, x: &Generator) -> Result<Generator> {
    let fields = t.fields.each_ref().map(|e| x.apply(e));
    let xf = form_map(&t.form, |e| x.apply(e));
    let inv = form_inverse(&t.form).map_err(|_| Error::NotInvertible("degenerate form".into()))?;
    let form = form_mul(&form_add(&xf, &form_mul(&t.form, &x.form)), &inv);
    Ok(Generator::new(fields, form))
}

/// `T_* X` written in the new variables (with unprimed names).
pub fn pushforward(t: &ReciprocalMap, x: &Generator) -> Result<Generator> {
    let raw = pushforward_raw(t, x)?;
    let inv = match &t.inverse {
        Some(i) => i.clone(),
        None => solve_inverse(t)?,
    };
    let b: BTreeMap<Symbol, Expr> = FIELDS
        .iter()
        .zip(&inv)
        .map(|(f, e)| (Symbol::new(f), e.clone()))
        .collect();
    Ok(raw.subs_map(&b))
}

/// Constant coefficients of `xp` in `basis`.
pub fn decompose(xp: &Generator, basis: &[Generator]) -> Result<Vec<Expr>> {
    let c = solve_in_span(xp, basis, &non_parameter)
        .ok_or_else(|| Error::NotInSpan(format!("no constant combination gives {xp}")))?;
    let rest = xp.sub(&combine(&c, basis));
    if !rest.is_zero() {
        return Err(Error::NotInSpan(format!("residual {rest}")));
    }
    Ok(c)
}

/// Matrix whose column `i` holds the coordinates of `T_* basis_i` in `basis`.
pub fn automorphism_matrix(
    t: &ReciprocalMap,
    labels: &[&str],
    basis: &[Generator],
) -> Result<AutomorphismMatrix> {
    let n = basis.len();
    let mut a = vec![vec![Expr::zero(); n]; n];
    for (i, x) in basis.iter().enumerate() {
        let c = decompose(&pushforward(t, x)?, basis)?;
        for (k, ck) in c.into_iter().enumerate() {
            a[k][i] = ck;
        }
    }
    Ok(AutomorphismMatrix::new(labels, a))
}
