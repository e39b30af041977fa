//! Exact solutions sampled on grids, finite-difference residuals, and the
//! numeric action of reciprocal maps on solutions.

pub mod analytic;
pub mod fd;
pub mod quad;
pub mod transform;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

pub use analytic::{make_solution, AnalyticSolution, Family};
pub use fd::{convergence_ratio, fd_residuals};
pub use quad::{cumulative_simpson, loop_closedness, path_coordinates, unit_square, PathOrder};
pub use transform::{primed_coordinates, transform_solution, transform_solution_with, CompiledMap, TransformConfig};

/// Anything that yields `(rho, u, v, p, S)` at a point.
pub trait Field2D: Send + Sync {
    fn eval(&self, x: f64, y: f64) -> Result<[f64; 5]>;
    fn describe(&self) -> String;

    /// Unprimed coordinates of a point, for solutions obtained by a map.
    fn preimage(&self, _x: f64, _y: f64) -> Option<Result<(f64, f64)>> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(x0: f64, y0: f64, hx: f64, hy: f64, nx: usize, ny: usize) -> Result<Grid> {
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(Error::InvalidParams(format!("grid spacings must be positive, got {hx}, {hy}")));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::GridTooSmall);
        }
        Ok(Grid { x0, y0, hx, hy, nx, ny })
    }

    /// `[x0, x1] x [y0, y1]` with `nx * ny` nodes.
    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Grid> {
        if nx < 2 || ny < 2 {
            return Err(Error::GridTooSmall);
        }
        Grid::new(x0, y0, (x1 - x0) / (nx - 1) as f64, (y1 - y0) / (ny - 1) as f64, nx, ny)
    }

    /// Same rectangle with twice the resolution.
    pub fn refined(&self) -> Grid {
        Grid { hx: self.hx / 2.0, hy: self.hy / 2.0, nx: 2 * self.nx - 1, ny: 2 * self.ny - 1, ..*self }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    pub fn x1(&self) -> f64 {
        self.x(self.nx - 1)
    }

    pub fn y1(&self) -> f64 {
        self.y(self.ny - 1)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn contains(&self, x: f64, y: f64, slack: f64) -> bool {
        let tol = slack * (self.x1() - self.x0).abs().max((self.y1() - self.y0).abs());
        x >= self.x0 - tol && x <= self.x1() + tol && y >= self.y0 - tol && y <= self.y1() + tol
    }
}

/// Field values at the nodes of a grid, indexed `i + nx * j`.
#[derive(Clone, Serialize)]
pub struct GridSolution {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    pub provenance: String,
    /// Evaluates the solution off the nodes.
    #[serde(skip)]
    pub source: Option<Arc<dyn Field2D>>,
}

impl fmt::Debug for GridSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSolution")
            .field("grid", &self.grid)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl GridSolution {
    /// Samples `source` at every node.
    pub fn sample(grid: Grid, source: Arc<dyn Field2D>) -> Result<GridSolution> {
        let mut sol = GridSolution::empty(grid, source.describe());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                sol.set(grid.idx(i, j), source.eval(grid.x(i), grid.y(j))?);
            }
        }
        sol.source = Some(source);
        Ok(sol)
    }

    pub(crate) fn empty(grid: Grid, provenance: String) -> GridSolution {
        let z = vec![0.0; grid.len()];
        GridSolution {
            grid,
            rho: z.clone(),
            u: z.clone(),
            v: z.clone(),
            p: z.clone(),
            s: z,
            provenance,
            source: None,
        }
    }

    pub fn state(&self, k: usize) -> [f64; 5] {
        [self.rho[k], self.u[k], self.v[k], self.p[k], self.s[k]]
    }

    pub(crate) fn set(&mut self, k: usize, f: [f64; 5]) {
        self.rho[k] = f[0];
        self.u[k] = f[1];
        self.v[k] = f[2];
        self.p[k] = f[3];
        self.s[k] = f[4];
    }

    pub fn fields(&self) -> [&[f64]; 5] {
        [&self.rho, &self.u, &self.v, &self.p, &self.s]
    }

    /// Largest nodewise difference over all five arrays; grids must match in size.
    pub fn max_difference(&self, other: &GridSolution) -> Result<f64> {
        if self.grid.nx != other.grid.nx || self.grid.ny != other.grid.ny {
            return Err(Error::Input("grids differ in size".into()));
        }
        let mut worst = 0f64;
        for (a, b) in self.fields().iter().zip(other.fields()) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        Ok(worst)
    }

    /// The point of the solution this one was mapped from, if any.
    pub fn preimage(&self, x: f64, y: f64) -> Option<Result<(f64, f64)>> {
        self.source.as_ref().and_then(|s| s.preimage(x, y))
    }

    /// Evaluates off-node through the source.
    pub fn eval(&self, x: f64, y: f64) -> Result<[f64; 5]> {
        match &self.source {
            Some(s) => s.eval(x, y),
            None => Err(Error::Input(format!(
                "solution `{}` has no source to evaluate between nodes",
                self.provenance
            ))),
        }
    }
}
