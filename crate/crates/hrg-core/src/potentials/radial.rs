//! `O(n)`-invariant per-block potentials `phi -> W(|phi|)` on a radial grid,
//! with natural-cubic-spline evaluation between knots and a fitted
//! quadratic-plus-quartic tail beyond the last knot.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Natural cubic spline with explicit second derivatives at the knots.
#[derive(Debug, Clone)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at the knots
}

impl CubicSpline {
    /// Radial potentials are even functions of the field, so the spline is
    /// clamped to zero slope at `r = 0`; the right boundary uses the
    /// not-a-knot condition (the endpoint curvature is extrapolated from
    /// the interior instead of being forced to zero).
    fn build(x: &[f64], y: &[f64]) -> Self {
        let k = x.len();
        let mut m = vec![0.0; k];
        if k >= 4 {
            // Unknowns M_0 .. M_{k-2}; M_{k-1} is eliminated by not-a-knot.
            let n = k - 1;
            let mut lower = vec![0.0; n];
            let mut diag = vec![0.0; n];
            let mut upper = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            // Clamped left end with slope 0.
            let h0 = x[1] - x[0];
            diag[0] = 2.0 * h0;
            upper[0] = h0;
            rhs[0] = 6.0 * (y[1] - y[0]) / h0;
            for i in 1..n {
                let ha = x[i] - x[i - 1];
                let hb = x[i + 1] - x[i];
                lower[i] = ha;
                diag[i] = 2.0 * (ha + hb);
                upper[i] = hb;
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hb - (y[i] - y[i - 1]) / ha);
            }
            // Not-a-knot right end: M_{k-1} = (1 + r) M_{k-2} - r M_{k-3},
            // r = h_{k-2}/h_{k-3}; fold into the last interior row.
            let r = (x[k - 1] - x[k - 2]) / (x[k - 2] - x[k - 3]);
            let hb = x[k - 1] - x[k - 2];
            diag[n - 1] += hb * (1.0 + r);
            lower[n - 1] -= hb * r;

            for i in 1..n {
                let w = lower[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n - 1] = rhs[n - 1] / diag[n - 1];
            for i in (0..n - 1).rev() {
                m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            }
            m[k - 1] = (1.0 + r) * m[k - 2] - r * m[k - 3];
        }
        Self { x: x.to_vec(), y: y.to_vec(), m }
    }

    fn segment(&self, r: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    fn value(&self, r: f64) -> f64 {
        let i = self.segment(r);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - r) / h;
        let b = (r - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    fn deriv(&self, r: f64) -> f64 {
        let i = self.segment(r);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - r) / h;
        let b = (r - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    fn second_deriv(&self, r: f64) -> f64 {
        let i = self.segment(r);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - r) / h;
        let b = (r - self.x[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RadialData {
    components: u32,
    block_volume: f64,
    grid: Vec<f64>,
    values: Vec<f64>,
}

/// Per-block potential `W(|phi|)` of an `n`-component field, tabulated on
/// `0 = r_0 < ... < r_M = r_max`. The stored values carry the block volume
/// `|B|` (i.e. `W = V_j(B) compose i_B`), so per-site quantities divide by
/// [`RadialPotential::block_volume`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RadialData", into = "RadialData")]
pub struct RadialPotential {
    components: u32,
    block_volume: f64,
    grid: Vec<f64>,
    values: Vec<f64>,
    #[serde(skip)]
    spline: CubicSpline,
    /// Tail fit `a + b r^2 + c r^4` on the last quarter of the grid.
    #[serde(skip)]
    tail: [f64; 3],
}

impl TryFrom<RadialData> for RadialPotential {
    type Error = CoreError;
    fn try_from(d: RadialData) -> Result<Self> {
        RadialPotential::new(d.components, d.block_volume, d.grid, d.values)
    }
}

impl From<RadialPotential> for RadialData {
    fn from(p: RadialPotential) -> Self {
        RadialData {
            components: p.components,
            block_volume: p.block_volume,
            grid: p.grid,
            values: p.values,
        }
    }
}

impl RadialPotential {
    pub fn new(components: u32, block_volume: f64, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if components < 1 {
            return Err(CoreError::Parameter("components must be >= 1".into()));
        }
        if grid.len() < 8 || grid.len() != values.len() {
            return Err(CoreError::Parameter(format!(
                "need >= 8 knots with matching values (got {} / {})",
                grid.len(),
                values.len()
            )));
        }
        if grid[0] != 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::Parameter("grid must be strictly increasing from 0".into()));
        }
        if !(block_volume >= 1.0) {
            return Err(CoreError::Parameter(format!("block volume {block_volume} must be >= 1")));
        }
        let spline = CubicSpline::build(&grid, &values);
        let tail = fit_tail(&grid, &values);
        Ok(Self { components, block_volume, grid, values, spline, tail })
    }

    /// Tabulates `f` on a uniform grid of `knots` radii up to `r_max`.
    pub fn from_fn(
        components: u32,
        block_volume: f64,
        r_max: f64,
        knots: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let grid: Vec<f64> = (0..knots).map(|k| r_max * k as f64 / (knots - 1) as f64).collect();
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(components, block_volume, grid, values)
    }

    pub fn components(&self) -> u32 {
        self.components
    }

    pub fn block_volume(&self) -> f64 {
        self.block_volume
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn knot_values(&self) -> &[f64] {
        &self.values
    }

    pub fn r_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn value(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= self.r_max() {
            self.spline.value(r)
        } else {
            let r2 = r * r;
            self.tail[0] + self.tail[1] * r2 + self.tail[2] * r2 * r2
        }
    }

    /// dW/dr (radial derivative, `r >= 0`).
    pub fn deriv(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= self.r_max() {
            self.spline.deriv(r)
        } else {
            2.0 * self.tail[1] * r + 4.0 * self.tail[2] * r * r * r
        }
    }

    pub fn second_deriv(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= self.r_max() {
            self.spline.second_deriv(r)
        } else {
            2.0 * self.tail[1] + 12.0 * self.tail[2] * r * r
        }
    }

    /// Minimal eigenvalue of `(1/|B|) Hess W` over `|phi| = r`: the radial
    /// curvature is `W''(r)`, the tangential one `W'(r)/r` with multiplicity
    /// `n - 1` (both equal `W''(0)` at the origin).
    pub fn hessian_min_eig(&self, r: f64) -> f64 {
        let radial = self.second_deriv(r);
        let eig = if self.components >= 2 {
            let tangential = if r < 1e-12 { radial } else { self.deriv(r) / r };
            radial.min(tangential)
        } else {
            radial
        };
        eig / self.block_volume
    }

    /// Scan of the per-site Hessian lower bound over `r in [r_lo, r_hi]`,
    /// returning `(min eigenvalue / |B|, argmin radius)`.
    pub fn hessian_scan(&self, r_lo: f64, r_hi: f64) -> (f64, f64) {
        let samples = 8 * self.grid.len();
        let mut best = f64::INFINITY;
        let mut arg = r_lo;
        for k in 0..=samples {
            let r = r_lo + (r_hi - r_lo) * k as f64 / samples as f64;
            let e = self.hessian_min_eig(r);
            if e < best {
                best = e;
                arg = r;
            }
        }
        (best, arg)
    }

    /// Worst-case non-convexity bound: `s_neg = max(0, -inf_r min-eig((1/|B|) Hess W))`
    /// and the minimising radius. Scans the grid plus a margin of tail.
    pub fn hessian_bounds(&self) -> Result<(f64, f64)> {
        if self.grid.len() < 17 {
            return Err(CoreError::Resolution(format!(
                "only {} knots; too coarse to bound curvature",
                self.grid.len()
            )));
        }
        let (min_eig, arg) = self.hessian_scan(0.0, 1.5 * self.r_max());
        Ok(((-min_eig).max(0.0), arg))
    }
}

fn fit_tail(grid: &[f64], values: &[f64]) -> [f64; 3] {
    // Least squares of a + b r^2 + c r^4 over the last quarter of the knots.
    let k = grid.len();
    let start = k - (k / 4).max(4);
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for i in start..k {
        let r2 = grid[i] * grid[i];
        let row = [1.0, r2, r2 * r2];
        for a in 0..3 {
            for b in 0..3 {
                ata[a][b] += row[a] * row[b];
            }
            atb[a] += row[a] * values[i];
        }
    }
    solve3(ata, atb)
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    let mut out = [0.0; 3];
    for i in 0..3 {
        let mut ai = a;
        for r in 0..3 {
            ai[r][i] = b[r];
        }
        out[i] = det(ai) / d;
    }
    out
}

/// Initial `|phi|^4` per-block potential `W(r) = |B| (g r^4 / 4 + nu r^2 / 2)`.
pub fn phi4_initial(
    g: f64,
    nu: f64,
    components: u32,
    block_volume: f64,
    r_max: f64,
    knots: usize,
) -> Result<RadialPotential> {
    if !(g > 0.0) {
        return Err(CoreError::Parameter(format!("coupling g = {g} must be > 0")));
    }
    RadialPotential::from_fn(components, block_volume, r_max, knots, |r| {
        block_volume * (0.25 * g * r.powi(4) + 0.5 * nu * r * r)
    })
}
