//! One renormalisation step: `W_+(phi) = -b * log E[exp(-W(phi + zeta))]`
//! with the scale's fluctuation variance, where the reblocking factor `b`
//! is `L^d` for ordinary steps and `1` for the final half-step.

use super::quadrature::{self, QuadRule};
use crate::error::{CoreError, Result};
use crate::potentials::{FourierPotential, RadialPotential};
use std::f64::consts::PI;

const ORDER_START: usize = 64;
const ORDER_MAX: usize = 512;
const STEP_TOL: f64 = 1e-10;

/// Generic per-block scalar step on an arbitrary output grid. The input is
/// any bounded-below scalar function (radial splines, periodic potentials,
/// closed forms); extension beyond its native domain is the caller's
/// responsibility via the closure itself.
pub fn rg_step_scalar(
    w: &dyn Fn(f64) -> f64,
    variance: f64,
    reblock: f64,
    out_grid: &[f64],
) -> Result<Vec<f64>> {
    if variance < 0.0 {
        return Err(CoreError::Parameter(format!("variance {variance} must be >= 0")));
    }
    if variance == 0.0 {
        return Ok(out_grid.iter().map(|&x| reblock * w(x)).collect());
    }
    let eval = |rule: &QuadRule| -> Vec<f64> {
        out_grid
            .iter()
            .map(|&x| reblock * quadrature::neg_log_gaussian_moment(rule, &|z| w(x + z), variance))
            .collect()
    };
    let mut order = ORDER_START;
    let mut prev = eval(&quadrature::hermite(order)?);
    while order < ORDER_MAX {
        order *= 2;
        let cur = eval(&quadrature::hermite(order)?);
        let dev = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dev < STEP_TOL {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(CoreError::Quadrature(format!(
        "scalar step not converged at order {ORDER_MAX} (variance {variance})"
    )))
}

/// Radial step for an `O(n)`-invariant per-block potential. For `n = 1` the
/// fluctuation is one-dimensional; for `n >= 2` it splits into a
/// longitudinal Gaussian and a transverse radius with a chi law, handled by
/// Gauss-Hermite x generalized Gauss-Laguerre quadrature.
pub fn rg_step_radial(
    pot: &RadialPotential,
    variance: f64,
    reblock: f64,
    out_grid: Option<&[f64]>,
) -> Result<RadialPotential> {
    if variance < 0.0 {
        return Err(CoreError::Parameter(format!("variance {variance} must be >= 0")));
    }
    let n = pot.components();
    let grid: Vec<f64> = match out_grid {
        Some(g) => g.to_vec(),
        None => pot.grid().to_vec(),
    };
    let volume = pot.block_volume() * reblock;
    if variance == 0.0 {
        let values: Vec<f64> = grid.iter().map(|&r| reblock * pot.value(r)).collect();
        return RadialPotential::new(n, volume, grid, values);
    }

    let eval = |order: usize| -> Result<Vec<f64>> {
        let hr = quadrature::hermite(order)?;
        if n == 1 {
            Ok(grid
                .iter()
                .map(|&r| {
                    reblock
                        * quadrature::neg_log_gaussian_moment(&hr, &|z| pot.value(r + z), variance)
                })
                .collect())
        } else {
            let lr = quadrature::laguerre_half(order.max(32).min(256), n as i64 - 3)?;
            Ok(grid
                .iter()
                .map(|&r| {
                    reblock
                        * quadrature::neg_log_gaussian_moment_radial(
                            &hr,
                            &lr,
                            &|zpar, rho| {
                                pot.value(((r + zpar).powi(2) + rho * rho).sqrt())
                            },
                            variance,
                        )
                })
                .collect())
        }
    };

    let mut order = ORDER_START;
    let mut prev = eval(order)?;
    while order < ORDER_MAX {
        order *= 2;
        let cur = eval(order)?;
        let dev = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dev < STEP_TOL {
            return RadialPotential::new(n, volume, grid, cur);
        }
        prev = cur;
    }
    Err(CoreError::Quadrature(format!(
        "radial step not converged at order {ORDER_MAX} (variance {variance}, n {n})"
    )))
}

/// Heat-kernel smoothing of periodic grid values: transform, multiply the
/// `q`-th coefficient by `exp(-variance q^2 / 2)`, transform back.
pub fn smooth_grid(values: &[f64], variance: f64) -> Vec<f64> {
    let m = values.len();
    let half = m / 2;
    // Real DFT of a (generically even) real signal.
    let mut cos_c = vec![0.0; half + 1];
    let mut sin_c = vec![0.0; half + 1];
    for q in 0..=half {
        let mut cr = 0.0;
        let mut ci = 0.0;
        for (k, v) in values.iter().enumerate() {
            let ang = 2.0 * PI * q as f64 * k as f64 / m as f64;
            cr += v * ang.cos();
            ci += v * ang.sin();
        }
        cos_c[q] = cr / m as f64;
        sin_c[q] = ci / m as f64;
    }
    (0..m)
        .map(|k| {
            let mut v = cos_c[0];
            for q in 1..=half {
                let damp = (-variance * (q * q) as f64 / 2.0).exp();
                let ang = 2.0 * PI * q as f64 * k as f64 / m as f64;
                let mult = if q == half && m % 2 == 0 { 1.0 } else { 2.0 };
                v += mult * damp * (cos_c[q] * ang.cos() + sin_c[q] * ang.sin());
            }
            v
        })
        .collect()
}

pub struct FourierStep {
    pub potential: FourierPotential,
    /// Set when the input norm exceeded the contraction-domain guard; the
    /// step still executes.
    pub domain_warning: bool,
}

/// Fourier-backend step: smooth `exp(-V)` by the scale's heat kernel on a
/// `4 (q_max + 1)`-point circle grid and take `-b log` back to coefficients.
pub fn rg_step_fourier(
    pot: &FourierPotential,
    variance: f64,
    reblock: f64,
) -> Result<FourierStep> {
    if variance < 0.0 {
        return Err(CoreError::Parameter(format!("variance {variance} must be >= 0")));
    }
    let domain_warning = pot.norm(true) > 0.2;
    let q_max = pot.q_max();
    let m = 4 * (q_max + 1);
    let v = pot.grid_values(m);
    let vmin = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let f: Vec<f64> = v.iter().map(|&x| (-(x - vmin)).exp()).collect();
    let smoothed = smooth_grid(&f, variance);
    if smoothed.iter().any(|&x| x <= 0.0) {
        return Err(CoreError::Quadrature(
            "smoothed density non-positive; potential outside the flow domain".into(),
        ));
    }
    let vplus: Vec<f64> = smoothed.iter().map(|&x| reblock * (vmin - x.ln())).collect();
    // Aliasing check on the top quartile of the representable band.
    let full = FourierPotential::from_grid(&vplus, m / 2)?;
    let top_start = (3 * (m / 2)) / 4;
    let mut top_energy = 0.0;
    for (q, c) in full.coeffs().iter().enumerate().skip(top_start) {
        top_energy += 2.0 * ((1 + q) as f64).powi(2) * c.abs();
    }
    if top_energy > 1e-10 {
        return Err(CoreError::Resolution(format!(
            "aliasing: top-quartile energy {top_energy:.2e} > 1e-10; increase q_max"
        )));
    }
    let potential = FourierPotential::from_coeffs(full.coeffs()[..=q_max].to_vec())?;
    Ok(FourierStep { potential, domain_warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_potential_is_fixed_point() {
        let grid: Vec<f64> = (0..32).map(|k| k as f64 / 8.0).collect();
        let out = rg_step_scalar(&|_| 0.0, 0.7, 4.0, &grid).unwrap();
        for v in out {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
        let f = FourierPotential::zero(8);
        let out = rg_step_fourier(&f, 3.0, 4.0).unwrap();
        assert!(!out.domain_warning);
        for c in out.potential.coeffs() {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_closed_form_scalar() {
        // W = c phi^2 / 2 -> W_+ = b (c' phi^2 / 2 + const), c' = c/(1 + c s2).
        let c = 0.6;
        let s2 = 0.9;
        let b = 4.0;
        let grid: Vec<f64> = (0..41).map(|k| -2.0 + k as f64 * 0.1).collect();
        let out = rg_step_scalar(&|x| 0.5 * c * x * x, s2, b, &grid).unwrap();
        let cp = c / (1.0 + c * s2);
        let konst = out[20]; // value at phi = 0
        for (k, &x) in grid.iter().enumerate() {
            let want = b * 0.5 * cp * x * x + konst;
            assert_abs_diff_eq!(out[k], want, epsilon = 1e-8);
        }
    }

    #[test]
    fn quadratic_closed_form_radial_n1() {
        let c = 0.8;
        let s2 = 0.5;
        let pot = RadialPotential::from_fn(1, 1.0, 8.0, 257, |r| 0.5 * c * r * r).unwrap();
        let out = rg_step_radial(&pot, s2, 1.0, None).unwrap();
        let cp = c / (1.0 + c * s2);
        let shift = out.value(0.0);
        for &r in &[0.5, 1.0, 2.0, 3.5] {
            assert_abs_diff_eq!(out.value(r) - shift, 0.5 * cp * r * r, epsilon = 1e-7);
        }
    }

    #[test]
    fn radial_n2_zero_variance_limit() {
        let pot = RadialPotential::from_fn(2, 1.0, 6.0, 129, |r| 0.1 * r * r).unwrap();
        let out = rg_step_radial(&pot, 0.0, 16.0, None).unwrap();
        for &r in &[0.0, 1.0, 3.0] {
            assert_abs_diff_eq!(out.value(r), 16.0 * pot.value(r), epsilon = 1e-10);
        }
        assert_abs_diff_eq!(out.block_volume(), 16.0, epsilon = 1e-12);
    }

    #[test]
    fn radial_n2_matches_2d_oracle() {
        let pot = RadialPotential::from_fn(2, 1.0, 9.0, 257, |r| {
            0.25 * 0.08 * r.powi(4) - 0.05 * r * r
        })
        .unwrap();
        let s2 = 0.6;
        let out = rg_step_radial(&pot, s2, 4.0, None).unwrap();
        for &r in &[0.0, 0.7, 1.6, 2.9] {
            let exact = oracle::gaussian_expect_2d(
                &|z1, z2| (-pot.value(((r + z1).powi(2) + z2 * z2).sqrt())).exp(),
                s2,
            )
            .unwrap();
            assert_abs_diff_eq!(out.value(r), -4.0 * exact.ln(), epsilon = 1e-7);
        }
    }

    #[test]
    fn fourier_first_order_smoothing() {
        // V = 2 v cos(phi): first-order output coefficient v e^{-s2/2} b.
        let v = 1e-4;
        let s2 = 1.2;
        let b = 4.0;
        let pot = FourierPotential::single_mode(1, v, 8);
        let out = rg_step_fourier(&pot, s2, b).unwrap();
        let want = v * (-s2 / 2.0).exp() * b;
        assert_abs_diff_eq!(out.potential.coeffs()[1], want, epsilon = 1e-9 * b);
    }

    #[test]
    fn fourier_q0_of_density_unchanged() {
        // The heat kernel fixes the constant mode of exp(-V).
        let pot = FourierPotential::single_mode(1, 0.02, 8);
        let m = 64;
        let v = pot.grid_values(m);
        let f: Vec<f64> = v.iter().map(|&x| (-x).exp()).collect();
        let smoothed = smooth_grid(&f, 2.0);
        let mean_before: f64 = f.iter().sum::<f64>() / m as f64;
        let mean_after: f64 = smoothed.iter().sum::<f64>() / m as f64;
        assert_abs_diff_eq!(mean_before, mean_after, epsilon = 1e-12);
    }

    #[test]
    fn fourier_step_matches_quadrature_oracle() {
        let pot = FourierPotential::from_coeffs(vec![0.0, 0.02, -0.005, 0.001]).unwrap();
        let s2 = 2.5;
        let b = 4.0;
        let out = rg_step_fourier(&pot, s2, b).unwrap().potential;
        for &phi in &[0.0, 0.9, 2.2, 4.4] {
            let exact = oracle::gaussian_expect_1d(&|z| (-pot.value(phi + z)).exp(), s2).unwrap();
            assert_abs_diff_eq!(out.value(phi), -b * exact.ln(), epsilon = 1e-8);
        }
    }

    #[test]
    fn fourier_domain_guard_flags_but_runs() {
        let pot = FourierPotential::single_mode(1, 0.1, 8); // norm 0.8 > 0.2
        let out = rg_step_fourier(&pot, 2.0, 4.0).unwrap();
        assert!(out.domain_warning);
    }

    #[test]
    fn semigroup_consistency() {
        // Two half-variance smoothings (no reblocking) equal one
        // full-variance smoothing.
        let pot = FourierPotential::from_coeffs(vec![0.0, 0.03, 0.01]).unwrap();
        let s2 = 1.6;
        let once = rg_step_fourier(&pot, s2, 1.0).unwrap().potential;
        let half = rg_step_fourier(&pot, s2 / 2.0, 1.0).unwrap().potential;
        let twice = rg_step_fourier(&half, s2 / 2.0, 1.0).unwrap().potential;
        for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }

        // Same for the radial backend on a mild quartic.
        let w = RadialPotential::from_fn(1, 1.0, 8.0, 257, |r| 0.02 * r.powi(4)).unwrap();
        let once = rg_step_radial(&w, 0.8, 1.0, None).unwrap();
        let half = rg_step_radial(&w, 0.4, 1.0, None).unwrap();
        let twice = rg_step_radial(&half, 0.4, 1.0, None).unwrap();
        for &r in &[0.0, 0.5, 1.5, 3.0] {
            assert_abs_diff_eq!(once.value(r), twice.value(r), epsilon = 1e-9);
        }
    }

    #[test]
    fn backend_cross_check_periodic() {
        // One step of an analytic periodic potential through the Fourier
        // backend and through the generic scalar backend agree in sup norm.
        let pot = FourierPotential::from_coeffs(vec![0.0, 0.04, -0.01, 0.002]).unwrap();
        let s2 = 1.9;
        let b = 4.0;
        let fourier = rg_step_fourier(&pot, s2, b).unwrap().potential;
        let m = 64;
        let grid: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
        let scalar = rg_step_scalar(&|x| pot.value(x), s2, b, &grid).unwrap();
        for (k, &phi) in grid.iter().enumerate() {
            assert_abs_diff_eq!(fourier.value(phi), scalar[k], epsilon = 1e-8);
        }
    }
}
