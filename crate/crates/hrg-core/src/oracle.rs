//! Brute-force validation paths: dense operator assembly and eigensolves,
//! exact 1d generator gaps, the single-site Discrete Gaussian gap with its
//! path-method bound, and dense quadrature for tiny Gibbs measures.
//!
//! Everything here is built directly from definitions (block membership,
//! finite differences, Riemann sums) and shares no operator code with the
//! matrix-free paths it validates.

use crate::error::{CoreError, Result};
use crate::lattice::{CovarianceDecomposition, CovarianceMode, HierLattice, DENSE_SITE_LIMIT};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, FactorizeC, InverseC, UPLO};

/// Symmetric dense matrix, symmetry enforced at construction.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    mat: Array2<f64>,
}

impl DenseOperator {
    pub fn new(mat: Array2<f64>) -> Result<Self> {
        let (r, c) = mat.dim();
        if r != c {
            return Err(CoreError::Parameter(format!("matrix {r}x{c} not square")));
        }
        let mut dev: f64 = 0.0;
        for i in 0..r {
            for j in (i + 1)..r {
                dev = dev.max((mat[[i, j]] - mat[[j, i]]).abs());
            }
        }
        if dev > 1e-12 {
            return Err(CoreError::Parameter(format!("matrix asymmetric by {dev:.3e}")));
        }
        Ok(Self { mat })
    }

    pub fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Array2<f64> {
        &self.mat
    }

    pub fn into_mat(self) -> Array2<f64> {
        self.mat
    }

    /// Ascending eigenvalues.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let (vals, _) = self.mat.eigh(UPLO::Lower)?;
        Ok(vals.to_vec())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectrum()?[0])
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.mat.dot(&Array1::from_vec(v.to_vec())).to_vec()
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        self.apply(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

fn check_capacity(sites: usize) -> Result<()> {
    if sites > DENSE_SITE_LIMIT {
        return Err(CoreError::Capacity { what: "sites", got: sites, max: DENSE_SITE_LIMIT });
    }
    Ok(())
}

/// Dense block-averaging projector `Q_j`, single spin component, built only
/// from block membership: `(Q_j)_{xy} = 1/|B_j|` iff `x` and `y` share their
/// scale-`j` block.
pub fn dense_q(lattice: &HierLattice, scale: usize) -> Result<DenseOperator> {
    let sites = lattice.sites();
    check_capacity(sites)?;
    let block = (lattice.side() as u64).pow(lattice.dim() * scale as u32) as usize;
    let w = 1.0 / block as f64;
    let mut m = Array2::<f64>::zeros((sites, sites));
    for x in 0..sites {
        for y in 0..sites {
            if x / block == y / block {
                m[[x, y]] = w;
            }
        }
    }
    DenseOperator::new(m)
}

/// Dense hierarchical Laplacian `-Delta_H = sum_j L^(-2(j-1)) (Q_{j-1} - Q_j)`.
pub fn dense_minus_laplacian(lattice: &HierLattice) -> Result<DenseOperator> {
    let sites = lattice.sites();
    check_capacity(sites)?;
    let mut m = Array2::<f64>::zeros((sites, sites));
    let mut prev = dense_q(lattice, 0)?.into_mat();
    let l2 = (lattice.side() as f64).powi(2);
    let mut coef = 1.0;
    for j in 1..=lattice.depth() {
        let cur = dense_q(lattice, j)?.into_mat();
        m += &((&prev - &cur) * coef);
        prev = cur;
        coef /= l2;
    }
    DenseOperator::new(m)
}

/// Dense spin-coupling matrix of the Gaussian part for the decomposition's
/// mode: `-Delta_H + m^2` or `beta(-Delta_H) + eps Q_N`.
pub fn dense_coupling(decomp: &CovarianceDecomposition) -> Result<DenseOperator> {
    let lat = decomp.lattice();
    let lap = dense_minus_laplacian(lat)?.into_mat();
    let m = match decomp.mode() {
        CovarianceMode::Massive { m2 } => lap + m2 * Array2::<f64>::eye(lat.sites()),
        CovarianceMode::SineGordon { beta } => {
            let eps = decomp.external_eps().expect("sine-gordon mode");
            let qn = dense_q(lat, lat.depth())?.into_mat();
            lap * beta + qn * eps
        }
    };
    DenseOperator::new(m)
}

/// Dense SPD inverse by Cholesky.
pub fn dense_inverse_spd(op: &DenseOperator) -> Result<DenseOperator> {
    let f = op.mat.factorizec(UPLO::Lower)?;
    DenseOperator::new(f.invc()?)
}

/// All dense hierarchical operators at once (small lattices only).
pub struct HierOperators {
    pub minus_laplacian: DenseOperator,
    pub qs: Vec<DenseOperator>,
    pub inverse: DenseOperator,
}

pub fn dense_hier_operators(decomp: &CovarianceDecomposition) -> Result<HierOperators> {
    let lat = decomp.lattice();
    let qs = (0..=lat.depth()).map(|j| dense_q(lat, j)).collect::<Result<Vec<_>>>()?;
    let minus_laplacian = dense_minus_laplacian(lat)?;
    let inverse = dense_inverse_spd(&dense_coupling(decomp)?)?;
    Ok(HierOperators { minus_laplacian, qs, inverse })
}

/// Entrywise max-abs difference between `sum_j lambda_j Q_j` (whose entries
/// depend only on the first common scale of a site pair) and the dense
/// inverse of the coupling matrix.
pub fn verify_covariance_decomposition(decomp: &CovarianceDecomposition) -> Result<f64> {
    let lat = decomp.lattice();
    let sites = lat.sites();
    check_capacity(sites)?;
    let inv = dense_inverse_spd(&dense_coupling(decomp)?)?;
    let profile = decomp.entry_profile();
    let ld = (lat.side() as u64).pow(lat.dim()) as usize;
    let mut worst: f64 = 0.0;
    for x in 0..sites {
        for y in 0..sites {
            let mut j = 0usize;
            let mut bx = x;
            let mut by = y;
            while bx != by {
                bx /= ld;
                by /= ld;
                j += 1;
            }
            worst = worst.max((profile[j] - inv.mat[[x, y]]).abs());
        }
    }
    Ok(worst)
}

/// Exact Poincare constant of a weighted path: probability weights `p` on
/// the nodes, conductances `c` on the edges, Dirichlet form
/// `D(F) = sum_i c_i (F_{i+1} - F_i)^2`. Working in gradient variables
/// `g_i = F_{i+1} - F_i` gives `var_p(F) = g^T V g` with
/// `V_{ij} = A_{min(i,j)} B_{max(i,j)}` (prefix/suffix masses around the
/// edges), so `1/gap` is the top eigenvalue of the bounded symmetric matrix
/// `C^{-1/2} V C^{-1/2}`. Unlike the similarity-transformed generator, this
/// form stays well-scaled for strongly graded measures.
fn path_inverse_gap(p: &[f64], c: &[f64]) -> Result<f64> {
    let m = p.len();
    debug_assert_eq!(c.len(), m - 1);
    let e = m - 1;
    let mut prefix = vec![0.0; e];
    let mut acc = 0.0;
    for i in 0..e {
        acc += p[i];
        prefix[i] = acc;
    }
    let mut suffix = vec![0.0; e];
    acc = 0.0;
    for i in (0..e).rev() {
        acc += p[i + 1];
        suffix[i] = acc;
    }
    let mut w = Array2::<f64>::zeros((e, e));
    for i in 0..e {
        for j in i..e {
            let v = prefix[i] * suffix[j] / (c[i] * c[j]).sqrt();
            w[[i, j]] = v;
            w[[j, i]] = v;
        }
    }
    let (vals, _) = w.eigh(UPLO::Lower)?;
    Ok(vals[e - 1])
}

/// Exact spectral gap of the 1d Langevin generator `L F = -F'' + H' F'` for
/// the measure `exp(-H)` on a grid, via the symmetric gradient-space
/// discretisation of the Dirichlet form, Richardson-extrapolated over two
/// grid resolutions.
pub fn generator_gap_1d(
    hamiltonian: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<f64> {
    if points < 32 || hi <= lo {
        return Err(CoreError::Parameter("need points >= 32 and hi > lo".into()));
    }
    let coarse = generator_gap_on_grid(hamiltonian, lo, hi, points)?;
    let fine = generator_gap_on_grid(hamiltonian, lo, hi, 2 * points)?;
    // O(h^2) scheme: Richardson step cancels the leading error term.
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    if (fine - coarse).abs() > 0.01 * extrapolated.abs().max(1e-300) {
        return Err(CoreError::Resolution(format!(
            "generator gap not converged: coarse {coarse:.6e}, fine {fine:.6e}"
        )));
    }
    Ok(extrapolated)
}

fn generator_gap_on_grid(h: &dyn Fn(f64) -> f64, lo: f64, hi: f64, k: usize) -> Result<f64> {
    let dx = (hi - lo) / (k - 1) as f64;
    let grid: Vec<f64> = (0..k).map(|i| lo + i as f64 * dx).collect();
    let hv: Vec<f64> = grid.iter().map(|&x| h(x)).collect();
    let hmin = hv.iter().cloned().fold(f64::INFINITY, f64::min);
    let mu: Vec<f64> = hv.iter().map(|&v| (-(v - hmin)).exp()).collect();
    if mu[0] > 1e-12 || mu[k - 1] > 1e-12 {
        return Err(CoreError::Resolution(format!(
            "measure mass at grid edge: {:.2e}, {:.2e}; widen the grid",
            mu[0],
            mu[k - 1]
        )));
    }
    // Drop the numerically massless fringe; it contributes < 1e-100 to both
    // forms but would produce denormal conductances.
    let keep: Vec<usize> = (0..k).filter(|&i| mu[i] > 1e-130).collect();
    let (first, last) = (keep[0], *keep.last().unwrap());
    let mu = &mu[first..=last];
    let hv = &hv[first..=last];
    let kk = mu.len();
    let z: f64 = mu.iter().sum();
    let p: Vec<f64> = mu.iter().map(|m| m / z).collect();
    let c: Vec<f64> = (0..kk - 1)
        .map(|i| (-((hv[i] + hv[i + 1]) / 2.0 - hmin)).exp() / (z * dx * dx))
        .collect();
    Ok(1.0 / path_inverse_gap(&p, &c)?)
}

/// Report of the exact single-site Discrete Gaussian gap computation.
#[derive(Debug, Clone)]
pub struct DgGapReport {
    /// Largest `gamma` with `var(F) <= (1/gamma) E[(F(n+2pi)-F(n))^2 + (F(n-2pi)-F(n))^2]`.
    pub gap: f64,
    /// Path-method upper bound on `1/gamma`.
    pub path_constant: f64,
    /// Number of integer states kept after truncation.
    pub states: usize,
}

/// Exact variational gap of the single-site measure `mu_psi` on `2*pi*Z`
/// (in the unit-coefficient Dirichlet-form normalisation) plus the
/// path-method constant bounding its inverse.
pub fn dg_exact_gap(beta: f64, psi: f64, truncation: usize) -> Result<DgGapReport> {
    if !(beta > 0.0) {
        return Err(CoreError::Parameter(format!("beta = {beta} must be > 0")));
    }
    let kk = truncation as i64;
    let t = psi / (2.0 * std::f64::consts::PI);
    // Integer-rescaled weights mu(k) ~ exp(-2 pi^2 beta (k - t)^2).
    let logw = |k: i64| -2.0 * std::f64::consts::PI.powi(2) * beta * (k as f64 - t).powi(2);
    let lmax = (-kk..=kk).map(logw).fold(f64::NEG_INFINITY, f64::max);
    // Keep numerically relevant states only.
    let kept: Vec<i64> = (-kk..=kk).filter(|&k| logw(k) - lmax > -300.0).collect();
    let boundary = (logw(-kk) - lmax).exp() + (logw(kk) - lmax).exp();
    if boundary > 1e-12 {
        return Err(CoreError::Truncation(format!(
            "boundary weight {boundary:.2e} > 1e-12; increase truncation"
        )));
    }
    let mut mu: Vec<f64> = kept.iter().map(|&k| (logw(k) - lmax).exp()).collect();
    let z: f64 = mu.iter().sum();
    for w in &mut mu {
        *w /= z;
    }
    let m = mu.len();
    if m < 2 {
        return Err(CoreError::Truncation("fewer than two states with mass".into()));
    }

    // Variational gap for the Dirichlet form with edge weights
    // (mu_k + mu_{k+1}), via the gradient-space formulation.
    let c: Vec<f64> = (0..m - 1).map(|i| mu[i] + mu[i + 1]).collect();
    let gap = 1.0 / path_inverse_gap(&mu, &c)?;

    // Path-method constant: max_i sum_{n <= i < m} mu_n mu_m (m - n) / (mu_i + mu_{i+1}).
    let mut path: f64 = 0.0;
    for i in 0..m - 1 {
        let mut s = 0.0;
        for n in 0..=i {
            for mm in (i + 1)..m {
                s += mu[n] * mu[mm] * (mm - n) as f64;
            }
        }
        path = path.max(s / (mu[i] + mu[i + 1]));
    }
    Ok(DgGapReport { gap, path_constant: path, states: m })
}

/// Exact moments of a Gibbs measure `exp(-H)` with at most two continuous
/// degrees of freedom, by iterated Simpson quadrature with interval doubling.
#[derive(Debug, Clone)]
pub struct GibbsMoments {
    pub log_z: f64,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

fn simpson_weights(k: usize) -> Vec<f64> {
    // k odd, composite Simpson on k points.
    let mut w = vec![0.0; k];
    w[0] = 1.0;
    w[k - 1] = 1.0;
    for (i, wi) in w.iter_mut().enumerate().take(k - 1).skip(1) {
        *wi = if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    w
}

/// Expectation `E[f]` under `exp(-H(x))/Z` on `[lo, hi]^dim`, `dim <= 2`.
pub fn gibbs_expect(
    dim: usize,
    h: &dyn Fn(&[f64]) -> f64,
    f: &dyn Fn(&[f64]) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if dim == 0 || dim > 2 {
        return Err(CoreError::Capacity { what: "continuous dof", got: dim, max: 2 });
    }
    let mut prev = f64::NAN;
    let mut k = if dim == 1 { 2001 } else { 401 };
    for _ in 0..6 {
        let cur = gibbs_expect_on_grid(dim, h, f, lo, hi, k)?;
        if prev.is_finite() && (cur - prev).abs() <= 1e-11 * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
        k = 2 * k - 1;
    }
    Err(CoreError::Quadrature(format!("gibbs_expect not converged (last {prev:.6e})")))
}

fn gibbs_expect_on_grid(
    dim: usize,
    h: &dyn Fn(&[f64]) -> f64,
    f: &dyn Fn(&[f64]) -> f64,
    lo: f64,
    hi: f64,
    k: usize,
) -> Result<f64> {
    let dx = (hi - lo) / (k - 1) as f64;
    let w = simpson_weights(k);
    let grid: Vec<f64> = (0..k).map(|i| lo + i as f64 * dx).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    match dim {
        1 => {
            let hv: Vec<f64> = grid.iter().map(|&x| h(&[x])).collect();
            let hmin = hv.iter().cloned().fold(f64::INFINITY, f64::min);
            for i in 0..k {
                let g = w[i] * (-(hv[i] - hmin)).exp();
                num += g * f(&[grid[i]]);
                den += g;
            }
        }
        2 => {
            let mut hmin = f64::INFINITY;
            for &x in &grid {
                for &y in &grid {
                    hmin = hmin.min(h(&[x, y]));
                }
            }
            for i in 0..k {
                for j in 0..k {
                    let p = [grid[i], grid[j]];
                    let g = w[i] * w[j] * (-(h(&p) - hmin)).exp();
                    num += g * f(&p);
                    den += g;
                }
            }
        }
        _ => unreachable!(),
    }
    if den <= 0.0 {
        return Err(CoreError::Quadrature("vanishing normalizer".into()));
    }
    Ok(num / den)
}

/// Full first/second moments under `exp(-H)` on `[lo, hi]^dim`.
pub fn gibbs_exact_moments(
    dim: usize,
    h: &dyn Fn(&[f64]) -> f64,
    lo: f64,
    hi: f64,
) -> Result<GibbsMoments> {
    let mut mean = vec![0.0; dim];
    for (i, m) in mean.iter_mut().enumerate() {
        *m = gibbs_expect(dim, h, &|x: &[f64]| x[i], lo, hi)?;
    }
    let mut cov = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let second = gibbs_expect(dim, h, &|x: &[f64]| x[i] * x[j], lo, hi)?;
            cov[i][j] = second - mean[i] * mean[j];
            cov[j][i] = cov[i][j];
        }
    }
    // log Z relative to the H-minimum, reported for regression fixtures.
    let k = 2001;
    let dx = (hi - lo) / (k - 1) as f64;
    let w = simpson_weights(k);
    let mut z = 0.0;
    match dim {
        1 => {
            let hv: Vec<f64> = (0..k).map(|i| h(&[lo + i as f64 * dx])).collect();
            let hmin = hv.iter().cloned().fold(f64::INFINITY, f64::min);
            for i in 0..k {
                z += w[i] * (-(hv[i] - hmin)).exp();
            }
            z *= dx / 3.0;
        }
        _ => {
            z = f64::NAN; // only reported in the 1d case
        }
    }
    Ok(GibbsMoments { log_z: z.ln(), mean, cov })
}

/// Independent 1d Gaussian-weighted integral `E_{zeta ~ N(0, s2)}[f(zeta)]`
/// by wide composite Simpson with doubling (validates the Gauss-Hermite
/// engine path).
pub fn gaussian_expect_1d(f: &dyn Fn(f64) -> f64, s2: f64) -> Result<f64> {
    if s2 == 0.0 {
        return Ok(f(0.0));
    }
    let s = s2.sqrt();
    let r = 10.0 * s;
    let mut prev = f64::NAN;
    let mut k = 1601;
    for _ in 0..6 {
        let dx = 2.0 * r / (k - 1) as f64;
        let w = simpson_weights(k);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..k {
            let x = -r + i as f64 * dx;
            let g = w[i] * (-(x * x) / (2.0 * s2)).exp();
            num += g * f(x);
            den += g;
        }
        let cur = num / den;
        if prev.is_finite() && (cur - prev).abs() <= 1e-12 * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
        k = 2 * k - 1;
    }
    Ok(prev)
}

/// Two-dimensional analogue for two-component fields.
pub fn gaussian_expect_2d(f: &dyn Fn(f64, f64) -> f64, s2: f64) -> Result<f64> {
    if s2 == 0.0 {
        return Ok(f(0.0, 0.0));
    }
    let s = s2.sqrt();
    let r = 9.0 * s;
    let mut prev = f64::NAN;
    let mut k = 401;
    for _ in 0..5 {
        let dx = 2.0 * r / (k - 1) as f64;
        let w = simpson_weights(k);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..k {
            let x = -r + i as f64 * dx;
            let gx = w[i] * (-(x * x) / (2.0 * s2)).exp();
            for j in 0..k {
                let y = -r + j as f64 * dx;
                let g = gx * w[j] * (-(y * y) / (2.0 * s2)).exp();
                num += g * f(x, y);
                den += g;
            }
        }
        let cur = num / den;
        if prev.is_finite() && (cur - prev).abs() <= 1e-11 * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
        k = 2 * k - 1;
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CovarianceMode, HierLattice};
    use approx::assert_abs_diff_eq;

    #[test]
    fn q_n_is_global_average() {
        let lat = HierLattice::new(2, 2, 1, 1).unwrap();
        let q = dense_q(&lat, 2).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_abs_diff_eq!(q.mat()[[x, y]], 0.25, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn laplacian_2site() {
        let lat = HierLattice::new(2, 1, 1, 1).unwrap();
        let lap = dense_minus_laplacian(&lat).unwrap();
        assert_abs_diff_eq!(lap.mat()[[0, 0]], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lap.mat()[[0, 1]], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lap.mat()[[1, 0]], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lap.mat()[[1, 1]], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn laplacian_row_sums_vanish() {
        let lat = HierLattice::new(2, 3, 2, 1).unwrap();
        let lap = dense_minus_laplacian(&lat).unwrap();
        for x in 0..lat.sites() {
            let s: f64 = (0..lat.sites()).map(|y| lap.mat()[[x, y]]).sum();
            assert!(s.abs() < 1e-13);
        }
    }

    #[test]
    fn laplacian_spectrum_matches_band_structure() {
        // Eigenvalue L^(-2(j-1)) with multiplicity L^(d(N-j+1)) - L^(d(N-j)),
        // plus 0 with multiplicity 1 (per spin component).
        let lat = HierLattice::new(2, 2, 2, 1).unwrap();
        let lap = dense_minus_laplacian(&lat).unwrap();
        let mut spec = lap.spectrum().unwrap();
        spec.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expect = vec![0.0];
        for j in 1..=2usize {
            let mult = lat.sites() / lat.block_size(j - 1) - lat.sites() / lat.block_size(j);
            let ev = 0.25f64.powi(j as i32 - 1);
            expect.extend(std::iter::repeat(ev).take(mult));
        }
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(spec.len(), expect.len());
        for (s, e) in spec.iter().zip(&expect) {
            assert_abs_diff_eq!(s, e, epsilon = 1e-10);
        }
    }

    #[test]
    fn verify_decomposition_examples() {
        let small = HierLattice::new(2, 1, 1, 1).unwrap();
        let dec = CovarianceDecomposition::new(small, CovarianceMode::Massive { m2: 1.0 }).unwrap();
        assert!(verify_covariance_decomposition(&dec).unwrap() <= 1e-12);

        let lat = HierLattice::new(2, 2, 2, 1).unwrap();
        let dec = CovarianceDecomposition::new(lat, CovarianceMode::Massive { m2: 0.1 }).unwrap();
        assert!(verify_covariance_decomposition(&dec).unwrap() <= 1e-9);

        let dec = CovarianceDecomposition::new(lat, CovarianceMode::SineGordon { beta: 0.3 }).unwrap();
        assert!(verify_covariance_decomposition(&dec).unwrap() <= 1e-9);
    }

    #[test]
    fn ou_generator_gap() {
        for c in [0.5, 1.0, 2.0] {
            let gap = generator_gap_1d(&|x| 0.5 * c * x * x, -9.0 / c.sqrt(), 9.0 / c.sqrt(), 400)
                .unwrap();
            assert!((gap - c).abs() < 1e-3 * c, "gap {gap} for c {c}");
        }
    }

    #[test]
    fn double_well_gap_is_slow() {
        let gap = generator_gap_1d(&|x| 0.25 * x.powi(4) - 0.5 * x * x, -7.0, 7.0, 500).unwrap();
        assert!(gap > 0.0 && gap < 1.0, "double-well gap {gap}");
    }

    #[test]
    fn bakry_emery_lower_bound() {
        // H'' >= c = 1 for the convex quartic 0.25 x^4 + 0.5 x^2.
        let gap = generator_gap_1d(&|x| 0.25 * x.powi(4) + 0.5 * x * x, -8.0, 8.0, 500).unwrap();
        assert!(gap >= 1.0 - 1e-3, "gap {gap}");
    }

    #[test]
    fn dg_gap_and_path_bound() {
        for beta in [0.1, 0.3, 1.0] {
            for i in 0..8 {
                let psi = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
                let rep = dg_exact_gap(beta, psi, 12).unwrap();
                assert!(rep.gap > 0.0);
                assert!(
                    rep.path_constant >= 1.0 / rep.gap * (1.0 - 1e-9),
                    "path {} vs 1/gap {}",
                    rep.path_constant,
                    1.0 / rep.gap
                );
            }
        }
    }

    #[test]
    fn dg_large_beta_concentrates() {
        let rep = dg_exact_gap(10.0, 0.0, 3).unwrap();
        // weight ratio mu(1)/mu(0) = exp(-2 pi^2 beta)
        let p = (-2.0 * std::f64::consts::PI.powi(2) * 10.0).exp();
        assert!(rep.gap > 0.0);
        let inv_gap = 1.0 / rep.gap;
        assert!(inv_gap > 0.1 * p && inv_gap < 10.0 * p, "1/gap {inv_gap} vs p {p}");
        assert!(rep.path_constant >= inv_gap);
        assert!(rep.path_constant < 100.0 * p);
    }

    #[test]
    fn gibbs_gaussian_moments() {
        let m = gibbs_exact_moments(1, &|x| 0.5 * 2.0 * x[0] * x[0], -8.0, 8.0).unwrap();
        assert_abs_diff_eq!(m.mean[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.cov[0][0], 0.5, epsilon = 1e-10);

        let m2 = gibbs_exact_moments(2, &|x| x[0] * x[0] + 0.5 * x[1] * x[1] - 0.3 * x[0] * x[1], -9.0, 9.0)
            .unwrap();
        // covariance = inverse of [[2, -0.3], [-0.3, 1]]
        let det = 2.0 - 0.09;
        assert_abs_diff_eq!(m2.cov[0][0], 1.0 / det, epsilon = 1e-8);
        assert_abs_diff_eq!(m2.cov[0][1], 0.3 / det, epsilon = 1e-8);
        assert_abs_diff_eq!(m2.cov[1][1], 2.0 / det, epsilon = 1e-8);
    }

    #[test]
    fn gaussian_expect_matches_closed_form() {
        // E[exp(-0.5 c (phi + z)^2)] for z ~ N(0, s2)
        let c = 0.7;
        let s2 = 1.3;
        let phi = 0.9;
        let got = gaussian_expect_1d(&|z| (-0.5 * c * (phi + z) * (phi + z)).exp(), s2).unwrap();
        let want = (1.0 / (1.0 + c * s2)).sqrt() * (-0.5 * c / (1.0 + c * s2) * phi * phi).exp();
        assert_abs_diff_eq!(got, want, epsilon = 1e-11);
    }
}
