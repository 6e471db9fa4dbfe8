//! Hierarchical lattice geometry, block-averaging projections, the
//! hierarchical Laplacian, and scale decompositions of its Green function.
//!
//! Sites are integers `0..L^(d*N)` in base-`L^d` digit order, so the block
//! containing a site at scale `j` is just the index prefix `x / L^(d*j)`.
//! No Euclidean geometry is ever needed: the model is entirely determined by
//! the nesting of blocks.

use crate::error::{CoreError, Result};
use crate::rng;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Dense-assembly cutoff shared with the oracle paths.
pub const DENSE_SITE_LIMIT: usize = 4096;

fn upow(base: u64, exp: u32) -> usize {
    base.checked_pow(exp)
        .and_then(|v| usize::try_from(v).ok())
        .expect("lattice size overflow")
}

/// Hierarchical lattice: `L^(d*N)` sites carrying `n`-component spins,
/// organised as an `L^d`-ary tree of depth `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierLattice {
    side: u32,
    depth: u32,
    dim: u32,
    components: u32,
}

impl HierLattice {
    pub fn new(side: u32, depth: u32, dim: u32, components: u32) -> Result<Self> {
        if side < 2 {
            return Err(CoreError::Parameter(format!("block side L = {side} must be >= 2")));
        }
        if depth < 1 || dim < 1 || components < 1 {
            return Err(CoreError::Parameter(format!(
                "need depth >= 1, dim >= 1, components >= 1 (got N={depth}, d={dim}, n={components})"
            )));
        }
        let bits = (side as f64).log2() * (dim * depth) as f64;
        if bits > 40.0 {
            return Err(CoreError::Parameter(format!(
                "lattice with L^(d*N) = {side}^{} sites is unreasonably large",
                dim * depth
            )));
        }
        Ok(Self { side, depth, dim, components })
    }

    pub fn side(&self) -> u32 {
        self.side
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn components(&self) -> usize {
        self.components as usize
    }

    /// Total number of sites `|Lambda| = L^(d*N)`.
    pub fn sites(&self) -> usize {
        upow(self.side as u64, self.dim * self.depth)
    }

    /// Number of sites in a scale-`j` block, `|B_j| = L^(d*j)`.
    pub fn block_size(&self, scale: usize) -> usize {
        upow(self.side as u64, self.dim * scale as u32)
    }

    /// Number of blocks at scale `j`.
    pub fn blocks_at(&self, scale: usize) -> usize {
        self.sites() / self.block_size(scale)
    }

    /// Index of the scale-`j` block containing `site`.
    pub fn block_of(&self, site: usize, scale: usize) -> usize {
        site / self.block_size(scale)
    }

    fn check_scale(&self, scale: usize, lo: usize) -> Result<()> {
        if scale < lo || scale > self.depth() {
            return Err(CoreError::ScaleOutOfRange { scale, lo, hi: self.depth() });
        }
        Ok(())
    }

    pub fn zeros(&self) -> FieldVector {
        FieldVector { lattice: *self, values: vec![0.0; self.sites() * self.components()] }
    }

    pub fn constant(&self, value: f64) -> FieldVector {
        FieldVector { lattice: *self, values: vec![value; self.sites() * self.components()] }
    }

    /// i.i.d. standard Gaussian field, deterministic in the seed.
    pub fn gaussian(&self, seed: u64) -> FieldVector {
        let mut r = rng::stream(seed);
        let values = (0..self.sites() * self.components()).map(|_| r.sample(StandardNormal)).collect();
        FieldVector { lattice: *self, values }
    }
}

/// Spin configuration: values indexed by `(site, component)`, site-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    lattice: HierLattice,
    values: Vec<f64>,
}

impl FieldVector {
    pub fn from_values(lattice: HierLattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.sites() * lattice.components() {
            return Err(CoreError::Parameter(format!(
                "field length {} != n*|Lambda| = {}",
                values.len(),
                lattice.sites() * lattice.components()
            )));
        }
        Ok(Self { lattice, values })
    }

    pub fn lattice(&self) -> &HierLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, site: usize, component: usize) -> f64 {
        self.values[site * self.lattice.components() + component]
    }

    pub fn dot(&self, other: &FieldVector) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &FieldVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Per-block means at scale `j`, laid out `block * n + component`.
    /// Computed bottom-up so the total cost is `O(n * |Lambda|)`.
    fn means_up_to(&self, scale: usize) -> Vec<Vec<f64>> {
        let n = self.lattice.components();
        let ld = self.lattice.block_size(1);
        let mut levels: Vec<Vec<f64>> = Vec::with_capacity(scale + 1);
        levels.push(self.values.clone());
        for j in 1..=scale {
            let blocks = self.lattice.blocks_at(j);
            let prev = &levels[j - 1];
            let mut cur = vec![0.0; blocks * n];
            for b in 0..blocks {
                for c in 0..ld {
                    let child = b * ld + c;
                    for i in 0..n {
                        cur[b * n + i] += prev[child * n + i];
                    }
                }
                for i in 0..n {
                    cur[b * n + i] /= ld as f64;
                }
            }
            levels.push(cur);
        }
        levels
    }

    /// Block-averaging projection `Q_j`: every value replaced by the mean
    /// over its scale-`j` block, per component. `Q_0` is the identity.
    pub fn block_average(&self, scale: usize) -> Result<FieldVector> {
        self.lattice.check_scale(scale, 0)?;
        if scale == 0 {
            return Ok(self.clone());
        }
        let n = self.lattice.components();
        let size = self.lattice.block_size(scale);
        let means = self.means_up_to(scale);
        let top = &means[scale];
        let mut out = vec![0.0; self.values.len()];
        for x in 0..self.lattice.sites() {
            let b = x / size;
            out[x * n..(x + 1) * n].copy_from_slice(&top[b * n..(b + 1) * n]);
        }
        Ok(FieldVector { lattice: self.lattice, values: out })
    }

    /// Fluctuation projection `P_j = Q_{j-1} - Q_j`, valid for `1 <= j <= N`.
    pub fn fluctuation_projection(&self, scale: usize) -> Result<FieldVector> {
        self.lattice.check_scale(scale, 1)?;
        let a = self.block_average(scale - 1)?;
        let b = self.block_average(scale)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
        Ok(FieldVector { lattice: self.lattice, values })
    }

    /// Hierarchical Laplacian `(-Delta_H) f = sum_j L^(-2(j-1)) P_j f`.
    /// Annihilates constants; positive semi-definite.
    pub fn apply_hier_laplacian(&self) -> FieldVector {
        let lat = &self.lattice;
        let n = lat.components();
        let depth = lat.depth();
        let means = self.means_up_to(depth);
        let mut out = vec![0.0; self.values.len()];
        let l2 = (lat.side() as f64).powi(2);
        for x in 0..lat.sites() {
            for i in 0..n {
                let mut acc = 0.0;
                let mut coef = 1.0; // L^(-2(j-1)) at j = 1
                for j in 1..=depth {
                    let lo = means[j - 1][lat.block_of(x, j - 1) * n + i];
                    let hi = means[j][lat.block_of(x, j) * n + i];
                    acc += coef * (lo - hi);
                    coef /= l2;
                }
                out[x * n + i] = acc;
            }
        }
        FieldVector { lattice: self.lattice, values: out }
    }
}

/// How the Gaussian part of the energy is regularised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CovarianceMode {
    /// `(-Delta_H + m^2)^{-1}`.
    Massive { m2: f64 },
    /// `(-beta Delta_H + eps Q_N)^{-1}` with the external field `eps = beta L^(-2N)`.
    SineGordon { beta: f64 },
}

/// Scale decomposition `sum_j lambda_j Q_j` of the covariance, together with
/// the per-scale fluctuation variances used by sampling and the RG flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovarianceDecomposition {
    lattice: HierLattice,
    mode: CovarianceMode,
    lambdas: Vec<f64>,
    /// `theta_j = 2^{-(j - j_m)_+}` damping factors (massive mode only).
    theta: Option<Vec<f64>>,
    mass_scale: Option<i64>,
}

impl CovarianceDecomposition {
    pub fn new(lattice: HierLattice, mode: CovarianceMode) -> Result<Self> {
        let depth = lattice.depth();
        let l2 = (lattice.side() as f64).powi(2);
        match mode {
            CovarianceMode::Massive { m2 } => {
                if !(m2 > 0.0) {
                    return Err(CoreError::Parameter(format!("m^2 = {m2} must be > 0")));
                }
                let mut lambdas = Vec::with_capacity(depth + 1);
                lambdas.push(1.0 / (1.0 + m2));
                for j in 1..depth {
                    let l2j = l2.powi(j as i32);
                    lambdas.push(l2j * (1.0 - 1.0 / l2) / ((1.0 + m2 * l2j) * (1.0 + m2 * l2j / l2)));
                }
                let l2top = l2.powi(depth as i32 - 1);
                lambdas.push(1.0 / (m2 * (1.0 + m2 * l2top)));
                let jm = (-(m2.ln()) / (2.0 * (lattice.side() as f64).ln())).floor() as i64;
                let theta = (0..=depth as i64)
                    .map(|j| 2f64.powi(-((j - jm).max(0) as i32)))
                    .collect();
                Ok(Self { lattice, mode, lambdas, theta: Some(theta), mass_scale: Some(jm) })
            }
            CovarianceMode::SineGordon { beta } => {
                if !(beta > 0.0) {
                    return Err(CoreError::Parameter(format!("beta = {beta} must be > 0")));
                }
                let sigma = 1.0 - 1.0 / l2;
                let mut lambdas = Vec::with_capacity(depth + 1);
                lambdas.push(1.0 / beta);
                for j in 1..=depth {
                    lambdas.push(sigma / beta * l2.powi(j as i32));
                }
                Ok(Self { lattice, mode, lambdas, theta: None, mass_scale: None })
            }
        }
    }

    pub fn lattice(&self) -> &HierLattice {
        &self.lattice
    }

    pub fn mode(&self) -> CovarianceMode {
        self.mode
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda(&self, scale: usize) -> f64 {
        self.lambdas[scale]
    }

    pub fn theta(&self) -> Option<&[f64]> {
        self.theta.as_deref()
    }

    pub fn mass_scale(&self) -> Option<i64> {
        self.mass_scale
    }

    /// External-field strength `eps = beta L^(-2N)` (Sine-Gordon mode).
    pub fn external_eps(&self) -> Option<f64> {
        match self.mode {
            CovarianceMode::SineGordon { beta } => {
                let l2n = (self.lattice.side() as f64).powi(2 * self.lattice.depth() as i32);
                Some(beta / l2n)
            }
            CovarianceMode::Massive { .. } => None,
        }
    }

    /// Variance of a per-block fluctuation component at scale `j`:
    /// `lambda_j / |B_j| = lambda_j L^(-d*j)`.
    pub fn per_block_variance(&self, scale: usize) -> f64 {
        self.lambdas[scale] / self.lattice.block_size(scale) as f64
    }

    /// Variance used for the final half-step (no reblocking): the scale-`N`
    /// fluctuation is constant on the whole of Lambda. In Sine-Gordon mode
    /// this is pinned to `1/beta`.
    pub fn final_step_variance(&self) -> f64 {
        match self.mode {
            CovarianceMode::Massive { .. } => self.per_block_variance(self.lattice.depth()),
            CovarianceMode::SineGordon { beta } => 1.0 / beta,
        }
    }

    /// Entry of `sum_j lambda_j Q_j` between two sites whose first common
    /// block is at scale `k`: `c_k = sum_{j >= k} lambda_j L^(-d*j)`.
    pub fn entry_profile(&self) -> Vec<f64> {
        let depth = self.lattice.depth();
        let mut c = vec![0.0; depth + 1];
        let mut acc = 0.0;
        for j in (0..=depth).rev() {
            acc += self.lambdas[j] / self.lattice.block_size(j) as f64;
            c[j] = acc;
        }
        c
    }

    /// Applies `sum_j lambda_j Q_j` to a field, matrix-free.
    pub fn apply(&self, field: &FieldVector) -> Result<FieldVector> {
        let mut out = field.lattice.zeros();
        for j in 0..=self.lattice.depth() {
            let q = field.block_average(j)?;
            for (o, v) in out.values.iter_mut().zip(q.values.iter()) {
                *o += self.lambdas[j] * v;
            }
        }
        Ok(out)
    }

    /// Entrywise max-abs difference between `sum_j lambda_j Q_j` and the
    /// densely inverted operator, computed by the independent oracle.
    pub fn verify_decomposition(&self) -> Result<f64> {
        crate::oracle::verify_covariance_decomposition(self)
    }

    /// Scale-`j` fluctuation field: constant on each scale-`j` block, blocks
    /// i.i.d. centered Gaussian with per-component variance
    /// `lambda_j L^(-d*j)`. One RNG stream per `(scale, block)`.
    pub fn sample_fluctuation(&self, scale: usize, seed: u64) -> Result<FieldVector> {
        self.lattice.check_scale(scale, 0)?;
        let n = self.lattice.components();
        let sd = self.per_block_variance(scale).sqrt();
        let size = self.lattice.block_size(scale);
        let mut out = self.lattice.zeros();
        for b in 0..self.lattice.blocks_at(scale) {
            let mut r = rng::stream2(seed, scale as u64, b as u64);
            let draw: Vec<f64> = (0..n).map(|_| sd * r.sample::<f64, _>(StandardNormal)).collect();
            for x in b * size..(b + 1) * size {
                out.values[x * n..(x + 1) * n].copy_from_slice(&draw);
            }
        }
        Ok(out)
    }
}
