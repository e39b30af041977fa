//! Simpson quadrature of the primed differentials along paths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transforms::ReciprocalMap;

use super::transform::CompiledMap;
use super::{Field2D, GridSolution};

/// Which axis the path from the origin follows first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathOrder {
    #[default]
    XFirst,
    YFirst,
}

/// Running integral of equally spaced samples: Simpson over pairs of intervals,
/// and the interpolating cubic through the first four samples for the first interval.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    if f.len() < 2 {
        return out;
    }
    out[1] = if f.len() >= 4 {
        h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
    } else if f.len() == 3 {
        h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
    } else {
        h / 2.0 * (f[0] + f[1])
    };
    for k in 2..f.len() {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    out
}

/// `int (dx', dy')` over the segment from `a` to `b` with `steps` (even) Simpson intervals.
pub(crate) fn segment(
    src: &dyn Field2D,
    map: &CompiledMap,
    a: (f64, f64),
    b: (f64, f64),
    steps: usize,
) -> Result<(f64, f64)> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let mut acc = (0.0, 0.0);
    for t in 0..=steps {
        let s = t as f64 / steps as f64;
        let phi = map.form(&src.eval(a.0 + s * dx, a.1 + s * dy)?)?;
        let w = if t == 0 || t == steps {
            1.0
        } else if t % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.0 += w * (phi[0][0] * dx + phi[0][1] * dy);
        acc.1 += w * (phi[1][0] * dx + phi[1][1] * dy);
    }
    let k = 1.0 / (3.0 * steps as f64);
    Ok((acc.0 * k, acc.1 * k))
}

/// `(x', y')` at `to` minus the value at `from`, integrated along the two
/// axis-parallel legs in the given order with `steps` Simpson intervals per leg.
pub fn path_coordinates(
    src: &dyn Field2D,
    map: &ReciprocalMap,
    from: (f64, f64),
    to: (f64, f64),
    order: PathOrder,
    steps: usize,
) -> Result<(f64, f64)> {
    let cm = CompiledMap::new(map)?;
    let steps = steps.max(2).next_multiple_of(2);
    let corner = match order {
        PathOrder::XFirst => (to.0, from.1),
        PathOrder::YFirst => (from.0, to.1),
    };
    let a = segment(src, &cm, from, corner, steps)?;
    let b = segment(src, &cm, corner, to, steps)?;
    Ok((a.0 + b.0, a.1 + b.1))
}

/// Corners of the unit square at `(x0, y0)`, counter-clockwise and closed.
pub fn unit_square(x0: f64, y0: f64) -> Vec<(f64, f64)> {
    vec![(x0, y0), (x0 + 1.0, y0), (x0 + 1.0, y0 + 1.0), (x0, y0 + 1.0), (x0, y0)]
}

/// `|oint dx'| + |oint dy'|` around a polyline, with field values from the
/// solution's source. The polyline is closed if its ends differ.
pub fn loop_closedness(sol: &GridSolution, map: &ReciprocalMap, polyline: &[(f64, f64)]) -> Result<f64> {
    let src = sol
        .source
        .as_deref()
        .ok_or_else(|| Error::Input("loop integrals need a solution with a source".into()))?;
    if polyline.len() < 3 {
        return Err(Error::DomainViolation("a loop needs at least three vertices".into()));
    }
    let g = sol.grid;
    for &(x, y) in polyline {
        if !g.contains(x, y, 1e-12) {
            return Err(Error::DomainViolation(format!("loop vertex ({x}, {y}) lies outside the grid")));
        }
    }
    let mut pts = polyline.to_vec();
    if pts.first() != pts.last() {
        pts.push(pts[0]);
    }
    let cm = CompiledMap::new(map)?;
    let h = g.hx.min(g.hy) / 8.0;
    let mut total = (0.0, 0.0);
    for w in pts.windows(2) {
        let len = ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt();
        let steps = ((len / h).ceil() as usize).max(16).next_multiple_of(2);
        let (a, b) = segment(src, &cm, w[0], w[1], steps).map_err(|e| match e {
            Error::NumericDomain(m) => Error::DomainViolation(m),
            e => e,
        })?;
        total.0 += a;
        total.1 += b;
    }
    Ok(total.0.abs() + total.1.abs())
}
