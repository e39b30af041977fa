//! Central-difference residuals of the four equations.

use crate::error::{Error, Result};

use super::GridSolution;

/// Max-norm of the residuals of continuity, the two momentum equations and
/// entropy transport over the interior nodes, with second-order central differences.
pub fn fd_residuals(sol: &GridSolution) -> Result<[f64; 4]> {
    let g = sol.grid;
    if g.nx < 3 || g.ny < 3 {
        return Err(Error::GridTooSmall);
    }
    let dx = |a: &[f64], k: usize| (a[k + 1] - a[k - 1]) / (2.0 * g.hx);
    let dy = |a: &[f64], k: usize| (a[k + g.nx] - a[k - g.nx]) / (2.0 * g.hy);
    let mass: Vec<f64> = sol.rho.iter().zip(&sol.u).map(|(r, u)| r * u).collect();
    let mass_y: Vec<f64> = sol.rho.iter().zip(&sol.v).map(|(r, v)| r * v).collect();
    let mut out = [0f64; 4];
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let k = g.idx(i, j);
            let (rho, u, v) = (sol.rho[k], sol.u[k], sol.v[k]);
            let f = [
                dx(&mass, k) + dy(&mass_y, k),
                rho * (u * dx(&sol.u, k) + v * dy(&sol.u, k)) + dx(&sol.p, k),
                rho * (u * dx(&sol.v, k) + v * dy(&sol.v, k)) + dy(&sol.p, k),
                u * dx(&sol.s, k) + v * dy(&sol.s, k),
            ];
            for (o, r) in out.iter_mut().zip(f) {
                if !r.is_finite() {
                    return Err(Error::NumericDomain(format!("non-finite residual at node ({i}, {j})")));
                }
                *o = o.max(r.abs());
            }
        }
    }
    Ok(out)
}

/// `coarse / fine` per equation; NaN when both vanish, since no rate can be read off.
pub fn convergence_ratio(coarse: &[f64; 4], fine: &[f64; 4]) -> [f64; 4] {
    let mut r = [f64::NAN; 4];
    for k in 0..4 {
        if fine[k] > 0.0 {
            r[k] = coarse[k] / fine[k];
        }
    }
    r
}
