//! Reciprocal maps applied to sampled solutions: primed fields, primed
//! coordinates by quadrature, and resampling on a rectangular primed grid.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symkernel::vars::FIELDS;
use crate::symkernel::{Compiled, FnImpls, Symbol};
use crate::transforms::ReciprocalMap;

use super::quad::{cumulative_simpson, segment, PathOrder};
use super::{Field2D, Grid, GridSolution};

/// Map components compiled for double-precision evaluation in the fields.
pub struct CompiledMap {
    pub name: String,
    fields: Vec<Compiled>,
    form: Vec<Compiled>,
}

impl CompiledMap {
    pub fn new(map: &ReciprocalMap) -> Result<CompiledMap> {
        let inputs: Vec<Symbol> = FIELDS.iter().map(|f| Symbol::new(f)).collect();
        let fns = FnImpls::new();
        let compile = |e| {
            Compiled::new(e, &inputs, &fns).map_err(|err| match err {
                Error::UnboundSymbol(s) => Error::InvalidParams(format!("{}: `{s}` needs a numeric value", map.name)),
                err => err,
            })
        };
        Ok(CompiledMap {
            name: map.name.clone(),
            fields: map.fields.iter().map(compile).collect::<Result<_>>()?,
            form: map.form.iter().flatten().map(compile).collect::<Result<_>>()?,
        })
    }

    pub fn fields(&self, f: &[f64; 5]) -> Result<[f64; 5]> {
        let mut out = [0.0; 5];
        for (o, c) in out.iter_mut().zip(&self.fields) {
            *o = c.eval(f)?;
        }
        Ok(out)
    }

    pub fn form(&self, f: &[f64; 5]) -> Result<[[f64; 2]; 2]> {
        let e = |k: usize| self.form[k].eval(f);
        Ok([[e(0)?, e(1)?], [e(2)?, e(3)?]])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransformConfig {
    /// Quadrature samples per grid interval; 1 uses the nodes only, larger
    /// (even) values sample the solution's source in between.
    pub sub: usize,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub order: PathOrder,
    /// Primed rectangle `[x0, x1, y0, y1]` to resample on instead of the largest one found.
    pub window: Option<[f64; 4]>,
    /// Primed coordinates given to the grid origin; by default `form(origin) * origin`.
    pub anchor: Option<(f64, f64)>,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig { sub: 1, newton_tol: 1e-12, max_iter: 50, order: PathOrder::XFirst, window: None, anchor: None }
    }
}

fn domain_err(e: Error, what: &str) -> Error {
    match e {
        Error::NumericDomain(m) => Error::DomainViolation(format!("{what}: {m}")),
        e => e,
    }
}

/// The form at a state, rejecting degenerate or non-finite values.
fn checked_form(map: &CompiledMap, f: &[f64; 5], at: (f64, f64)) -> Result<[[f64; 2]; 2]> {
    let phi = map.form(f).map_err(|e| domain_err(e, &format!("form at ({}, {})", at.0, at.1)))?;
    let det = phi[0][0] * phi[1][1] - phi[0][1] * phi[1][0];
    let scale = phi.iter().flatten().fold(0f64, |m, v| m.max(v.abs()));
    if !(det.abs() > 1e-12 * scale * scale) {
        return Err(Error::DomainViolation(format!(
            "form of {} degenerates at ({}, {})",
            map.name, at.0, at.1
        )));
    }
    Ok(phi)
}

fn checked_fields(map: &CompiledMap, f: &[f64; 5], at: (f64, f64)) -> Result<[f64; 5]> {
    let out = map.fields(f).map_err(|e| domain_err(e, &format!("fields at ({}, {})", at.0, at.1)))?;
    if !(out[0] > 0.0) {
        return Err(Error::DomainViolation(format!(
            "primed density {} at ({}, {}) is not positive",
            out[0], at.0, at.1
        )));
    }
    Ok(out)
}

/// Primed coordinates of every node. Unless anchored, the constant of integration
/// puts the origin at `form(origin) * (x0, y0)`, so constant flows map linearly.
pub fn primed_coordinates(
    sol: &GridSolution,
    map: &ReciprocalMap,
    cfg: &TransformConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let cm = CompiledMap::new(map)?;
    node_coordinates(sol, &cm, cfg)
}

fn node_coordinates(sol: &GridSolution, cm: &CompiledMap, cfg: &TransformConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = sol.grid;
    if g.nx < 3 || g.ny < 3 {
        return Err(Error::GridTooSmall);
    }
    let sub = cfg.sub.max(1);
    if sub > 1 && sub % 2 == 1 {
        return Err(Error::InvalidParams("quadrature subdivision must be 1 or even".into()));
    }
    // form at fine sample (a, b) in units of the fine spacing
    let phi = |a: usize, b: usize| -> Result<[[f64; 2]; 2]> {
        if a.is_multiple_of(sub) && b.is_multiple_of(sub) {
            let k = g.idx(a / sub, b / sub);
            checked_form(cm, &sol.state(k), (g.x(a / sub), g.y(b / sub)))
        } else {
            let (x, y) = (g.x0 + a as f64 * g.hx / sub as f64, g.y0 + b as f64 * g.hy / sub as f64);
            checked_form(cm, &sol.eval(x, y)?, (x, y))
        }
    };
    let (fx, fy) = ((g.nx - 1) * sub + 1, (g.ny - 1) * sub + 1);
    let (hx, hy) = (g.hx / sub as f64, g.hy / sub as f64);
    let p0 = phi(0, 0)?;
    let c = cfg
        .anchor
        .unwrap_or((p0[0][0] * g.x0 + p0[0][1] * g.y0, p0[1][0] * g.x0 + p0[1][1] * g.y0));
    let mut xs = vec![0.0; g.len()];
    let mut ys = vec![0.0; g.len()];
    // a line integral of column `col` of the form along x (col 0) or y (col 1)
    let line = |fixed: usize, col: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let n = if col == 0 { fx } else { fy };
        let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for t in 0..n {
            let m = if col == 0 { phi(t, fixed)? } else { phi(fixed, t)? };
            a.push(m[0][col]);
            b.push(m[1][col]);
        }
        let h = if col == 0 { hx } else { hy };
        Ok((cumulative_simpson(&a, h), cumulative_simpson(&b, h)))
    };
    match cfg.order {
        PathOrder::XFirst => {
            let (rx, ry) = line(0, 0)?;
            for i in 0..g.nx {
                let (cx, cy) = line(i * sub, 1)?;
                for j in 0..g.ny {
                    let k = g.idx(i, j);
                    xs[k] = c.0 + rx[i * sub] + cx[j * sub];
                    ys[k] = c.1 + ry[i * sub] + cy[j * sub];
                }
            }
        }
        PathOrder::YFirst => {
            let (cx, cy) = line(0, 1)?;
            for j in 0..g.ny {
                let (rx, ry) = line(j * sub, 0)?;
                for i in 0..g.nx {
                    let k = g.idx(i, j);
                    xs[k] = c.0 + cx[j * sub] + rx[i * sub];
                    ys[k] = c.1 + cy[j * sub] + ry[i * sub];
                }
            }
        }
    }
    Ok((xs, ys))
}

/// Nodes bucketed by their primed position, for the Newton starting guess.
struct Buckets {
    lo: (f64, f64),
    cell: (f64, f64),
    dims: (usize, usize),
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(xs: &[f64], ys: &[f64], dims: (usize, usize)) -> Buckets {
        let (lo, hi) = bbox(xs, ys);
        let cell = (
            ((hi.0 - lo.0) / dims.0 as f64).max(f64::MIN_POSITIVE),
            ((hi.1 - lo.1) / dims.1 as f64).max(f64::MIN_POSITIVE),
        );
        let mut b = Buckets { lo, cell, dims, cells: vec![Vec::new(); dims.0 * dims.1] };
        for k in 0..xs.len() {
            let (i, j) = b.locate(xs[k], ys[k]);
            b.cells[i + dims.0 * j].push(k);
        }
        b
    }

    fn locate(&self, x: f64, y: f64) -> (usize, usize) {
        let c = |v: f64, lo: f64, h: f64, n: usize| (((v - lo) / h).floor().max(0.0) as usize).min(n - 1);
        (c(x, self.lo.0, self.cell.0, self.dims.0), c(y, self.lo.1, self.cell.1, self.dims.1))
    }

    fn nearest(&self, x: f64, y: f64, xs: &[f64], ys: &[f64]) -> usize {
        let (ci, cj) = self.locate(x, y);
        let mut best: Option<(f64, usize)> = None;
        let mut found_at = None;
        let max_r = self.dims.0.max(self.dims.1);
        for r in 0..=max_r {
            if matches!(found_at, Some(f) if r > f + 1) {
                break;
            }
            let (i0, i1) = (ci.saturating_sub(r), (ci + r).min(self.dims.0 - 1));
            let (j0, j1) = (cj.saturating_sub(r), (cj + r).min(self.dims.1 - 1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    if i.abs_diff(ci).max(j.abs_diff(cj)) != r {
                        continue;
                    }
                    for &k in &self.cells[i + self.dims.0 * j] {
                        let d = (xs[k] - x).powi(2) + (ys[k] - y).powi(2);
                        if best.is_none_or(|(b, _)| d < b) {
                            best = Some((d, k));
                        }
                    }
                }
            }
            if best.is_some() && found_at.is_none() {
                found_at = Some(r);
            }
        }
        best.map(|(_, k)| k).unwrap_or(0)
    }
}

fn bbox(xs: &[f64], ys: &[f64]) -> ((f64, f64), (f64, f64)) {
    let mn = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let mx = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    ((mn(xs), mn(ys)), (mx(xs), mx(ys)))
}

enum Inverter {
    /// `x = origin + a_inv (x' - image of origin)`.
    Linear { a_inv: [[f64; 2]; 2], image: (f64, f64), origin: (f64, f64) },
    Newton { grid: Grid, xs: Vec<f64>, ys: Vec<f64>, buckets: Buckets, tol: f64, max_iter: usize },
}

/// The primed solution as a function of the primed coordinates.
struct Pulled {
    base: Arc<dyn Field2D>,
    map: Arc<CompiledMap>,
    inv: Inverter,
    label: String,
}

impl Pulled {
    fn preimage(&self, xp: f64, yp: f64) -> Result<(f64, f64)> {
        match &self.inv {
            Inverter::Linear { a_inv, image, origin } => {
                let (dx, dy) = (xp - image.0, yp - image.1);
                Ok((
                    origin.0 + a_inv[0][0] * dx + a_inv[0][1] * dy,
                    origin.1 + a_inv[1][0] * dx + a_inv[1][1] * dy,
                ))
            }
            Inverter::Newton { grid, xs, ys, buckets, tol, max_iter } => {
                let k = buckets.nearest(xp, yp, xs, ys);
                let node = (grid.x(k % grid.nx), grid.y(k / grid.nx));
                let (mut x, mut y) = node;
                let scale = 1f64.max(xp.abs()).max(yp.abs());
                for _ in 0..*max_iter {
                    let (ix, iy) = segment(self.base.as_ref(), &self.map, node, (x, y), 8)?;
                    let r = (xs[k] + ix - xp, ys[k] + iy - yp);
                    if r.0.abs().max(r.1.abs()) <= tol * scale {
                        return Ok((x, y));
                    }
                    let j = self.map.form(&self.base.eval(x, y)?)?;
                    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                    x -= (j[1][1] * r.0 - j[0][1] * r.1) / det;
                    y -= (-j[1][0] * r.0 + j[0][0] * r.1) / det;
                    if !(x.is_finite() && y.is_finite()) {
                        break;
                    }
                }
                Err(Error::NewtonDivergence(format!(
                    "no preimage of ({xp}, {yp}) under {} within {max_iter} iterations",
                    self.map.name
                )))
            }
        }
    }
}

impl Field2D for Pulled {
    fn eval(&self, x: f64, y: f64) -> Result<[f64; 5]> {
        let (a, b) = self.preimage(x, y)?;
        self.map.fields(&self.base.eval(a, b)?)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }

    fn preimage(&self, x: f64, y: f64) -> Option<Result<(f64, f64)>> {
        Some(Pulled::preimage(self, x, y))
    }
}

pub fn transform_solution(sol: &GridSolution, map: &ReciprocalMap) -> Result<GridSolution> {
    transform_solution_with(sol, map, &TransformConfig::default())
}

/// Primed fields on a rectangular primed grid with the same node counts. When
/// the form is constant and diagonal the primed grid is the image of the
/// original one and the arrays are mapped node by node; otherwise every primed
/// node is pulled back, in closed form for a constant form and by Newton
/// iteration with the form as Jacobian in general.
pub fn transform_solution_with(sol: &GridSolution, map: &ReciprocalMap, cfg: &TransformConfig) -> Result<GridSolution> {
    let cm = Arc::new(CompiledMap::new(map)?);
    let g = sol.grid;
    let mut primed = Vec::with_capacity(g.len());
    let mut forms = Vec::with_capacity(g.len());
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.idx(i, j);
            let at = (g.x(i), g.y(j));
            primed.push(checked_fields(&cm, &sol.state(k), at)?);
            forms.push(checked_form(&cm, &sol.state(k), at)?);
        }
    }
    let (xs, ys) = node_coordinates(sol, &cm, cfg)?;
    let label = format!("{}[{}]", map.name, sol.provenance);
    let constant = forms.iter().all(|f| *f == forms[0]);
    let a = forms[0];
    let image = (xs[0], ys[0]);
    let linear = || {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        Inverter::Linear {
            a_inv: [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]],
            image,
            origin: (g.x0, g.y0),
        }
    };
    let pulled = |inv| {
        sol.source.clone().map(|base| {
            Arc::new(Pulled { base, map: cm.clone(), inv, label: label.clone() }) as Arc<dyn Field2D>
        })
    };

    if constant && a[0][1] == 0.0 && a[1][0] == 0.0 {
        let (hx, hy) = ((a[0][0] * g.hx).abs(), (a[1][1] * g.hy).abs());
        let (lo, _) = bbox(&xs, &ys);
        let grid = Grid::new(lo.0, lo.1, hx, hy, g.nx, g.ny)?;
        let mut out = GridSolution::empty(grid, label.clone());
        for j in 0..g.ny {
            for i in 0..g.nx {
                let ii = if a[0][0] > 0.0 { i } else { g.nx - 1 - i };
                let jj = if a[1][1] > 0.0 { j } else { g.ny - 1 - j };
                out.set(grid.idx(ii, jj), primed[g.idx(i, j)]);
            }
        }
        out.source = pulled(linear());
        return Ok(out);
    }

    let base = sol.source.clone().ok_or_else(|| {
        Error::Input(format!("resampling `{}` needs a source to evaluate between nodes", sol.provenance))
    })?;
    let inv = if constant {
        linear()
    } else {
        Inverter::Newton {
            grid: g,
            buckets: Buckets::new(&xs, &ys, (g.nx, g.ny)),
            xs: xs.clone(),
            ys: ys.clone(),
            tol: cfg.newton_tol,
            max_iter: cfg.max_iter,
        }
    };
    let p = Pulled { base, map: cm.clone(), inv, label: label.clone() };
    let (lo, hi) = bbox(&xs, &ys);
    let mid = g.idx(g.nx / 2, g.ny / 2);
    let centre = (xs[mid], ys[mid]);
    let half = ((hi.0 - lo.0) / 2.0, (hi.1 - lo.1) / 2.0);
    let grid_at = |s: f64| {
        Grid::rect(
            centre.0 - s * half.0,
            centre.0 + s * half.0,
            centre.1 - s * half.1,
            centre.1 + s * half.1,
            g.nx,
            g.ny,
        )
    };
    if let Some([x0, x1, y0, y1]) = cfg.window {
        let mut out = resample(&p, Grid::rect(x0, x1, y0, y1, g.nx, g.ny)?, &g, &label)?;
        out.source = Some(Arc::new(p));
        return Ok(out);
    }
    // largest rectangle about the image of the central node whose boundary pulls back inside
    let (mut ok, mut bad) = (0.0, 1.0);
    if boundary_inside(&p, &grid_at(1.0)?, &g) {
        ok = 1.0;
    } else {
        for _ in 0..30 {
            let s = 0.5 * (ok + bad);
            if boundary_inside(&p, &grid_at(s)?, &g) {
                ok = s;
            } else {
                bad = s;
            }
        }
    }
    let mut s = if ok > 0.0 { ok } else { bad };
    loop {
        match resample(&p, grid_at(s)?, &g, &label) {
            Ok(mut out) => {
                out.source = Some(Arc::new(p));
                return Ok(out);
            }
            Err(e @ (Error::DomainViolation(_) | Error::NewtonDivergence(_))) if s * 0.9 < 1e-6 => return Err(e),
            Err(Error::DomainViolation(_) | Error::NewtonDivergence(_)) => {}
            Err(e) => return Err(e),
        }
        s *= 0.9;
    }
}

fn boundary_inside(p: &Pulled, grid: &Grid, base: &Grid) -> bool {
    let mut nodes = Vec::new();
    for i in 0..grid.nx {
        nodes.push((i, 0));
        nodes.push((i, grid.ny - 1));
    }
    for j in 0..grid.ny {
        nodes.push((0, j));
        nodes.push((grid.nx - 1, j));
    }
    nodes
        .iter()
        .all(|&(i, j)| matches!(p.preimage(grid.x(i), grid.y(j)), Ok((x, y)) if base.contains(x, y, 1e-9)))
}

fn resample(p: &Pulled, grid: Grid, base: &Grid, label: &str) -> Result<GridSolution> {
    let mut out = GridSolution::empty(grid, label.to_string());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = p.preimage(grid.x(i), grid.y(j))?;
            if !base.contains(x, y, 1e-9) {
                return Err(Error::DomainViolation(format!(
                    "primed node ({}, {}) pulls back to ({x}, {y}) outside the grid",
                    grid.x(i),
                    grid.y(j)
                )));
            }
            let f = p.base.eval(x, y)?;
            out.set(grid.idx(i, j), checked_fields(&p.map, &f, (x, y))?);
        }
    }
    Ok(out)
}
