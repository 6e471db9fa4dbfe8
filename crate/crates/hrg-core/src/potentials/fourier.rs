//! Real even `2*pi`-periodic potentials as cosine series
//! `V(phi) = c_0 + 2 sum_{q >= 1} c_q cos(q phi)`, with the weighted
//! coefficient norm `||V|| = sum_q (1 + |q|)^2 |V^(q)|` used to control the
//! Sine-Gordon flow.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Weight `w(q) = (1 + |q|)^2`.
pub fn weight(q: usize) -> f64 {
    ((1 + q) as f64).powi(2)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierPotential {
    /// `coeffs[q] = V^(q)` for `q = 0..=q_max`; `V^(-q) = V^(q)`.
    coeffs: Vec<f64>,
}

impl FourierPotential {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(CoreError::Parameter("need at least the constant coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(q_max: usize) -> Self {
        Self { coeffs: vec![0.0; q_max + 1] }
    }

    /// Single-mode potential `2 v cos(q phi)`.
    pub fn single_mode(q: usize, v: f64, q_max: usize) -> Self {
        let mut c = vec![0.0; q_max.max(q) + 1];
        c[q] = v;
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn q_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self, phi: f64) -> f64 {
        let mut v = self.coeffs[0];
        for (q, c) in self.coeffs.iter().enumerate().skip(1) {
            v += 2.0 * c * (q as f64 * phi).cos();
        }
        v
    }

    pub fn deriv(&self, phi: f64) -> f64 {
        let mut v = 0.0;
        for (q, c) in self.coeffs.iter().enumerate().skip(1) {
            v -= 2.0 * c * q as f64 * (q as f64 * phi).sin();
        }
        v
    }

    pub fn second_deriv(&self, phi: f64) -> f64 {
        let mut v = 0.0;
        for (q, c) in self.coeffs.iter().enumerate().skip(1) {
            v -= 2.0 * c * (q as f64).powi(2) * (q as f64 * phi).cos();
        }
        v
    }

    /// Weighted norm `sum_q w(q) |V^(q)|`; with `subtract_constant` the `q=0`
    /// term is dropped, i.e. `||V - V^(0)||`.
    pub fn norm(&self, subtract_constant: bool) -> f64 {
        let mut s = if subtract_constant { 0.0 } else { self.coeffs[0].abs() };
        for (q, c) in self.coeffs.iter().enumerate().skip(1) {
            s += 2.0 * weight(q) * c.abs();
        }
        s
    }

    /// Upper bound `sum_{q != 0} q^2 |V^(q)|` for `sup(-V'')`, plus the exact
    /// sup of `-V''` on a dense grid for tightness comparison.
    pub fn second_derivative_sup(&self) -> (f64, f64) {
        let bound: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(q, c)| 2.0 * (q as f64).powi(2) * c.abs())
            .sum();
        let m = 8 * self.coeffs.len().max(8);
        let mut sup = f64::NEG_INFINITY;
        for k in 0..m {
            let phi = 2.0 * PI * k as f64 / m as f64;
            sup = sup.max(-self.second_deriv(phi));
        }
        (bound, sup.max(0.0))
    }

    /// Values on the uniform grid `phi_k = 2 pi k / m`.
    pub fn grid_values(&self, m: usize) -> Vec<f64> {
        (0..m).map(|k| self.value(2.0 * PI * k as f64 / m as f64)).collect()
    }

    /// Recovers cosine coefficients `q = 0..=q_max` from uniform grid samples
    /// of an even function (exact when the signal is band-limited below the
    /// Nyquist frequency `m/2`).
    pub fn from_grid(values: &[f64], q_max: usize) -> Result<Self> {
        let m = values.len();
        if m < 2 * q_max + 2 {
            return Err(CoreError::Resolution(format!(
                "{m} grid points cannot resolve q_max = {q_max}"
            )));
        }
        let mut coeffs = Vec::with_capacity(q_max + 1);
        for q in 0..=q_max {
            let mut c = 0.0;
            for (k, v) in values.iter().enumerate() {
                c += v * (2.0 * PI * q as f64 * k as f64 / m as f64).cos();
            }
            coeffs.push(c / m as f64);
        }
        Ok(Self { coeffs })
    }

    /// Builds the series of an arbitrary even periodic function by sampling.
    pub fn from_fn(f: impl Fn(f64) -> f64, q_max: usize, m: usize) -> Result<Self> {
        let values: Vec<f64> = (0..m).map(|k| f(2.0 * PI * k as f64 / m as f64)).collect();
        Self::from_grid(&values, q_max)
    }

    /// Pointwise product (used by the norm product-property checks).
    pub fn product(&self, other: &Self) -> Result<Self> {
        let q_max = self.q_max() + other.q_max();
        let m = 4 * (q_max + 1);
        let a = self.grid_values(m);
        let b = other.grid_values(m);
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::from_grid(&prod, q_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn norm_examples() {
        let v = FourierPotential::single_mode(1, 0.05, 4);
        assert_abs_diff_eq!(v.norm(true), 8.0 * 0.05, epsilon = 1e-15);
        assert_eq!(FourierPotential::zero(8).norm(false), 0.0);
    }

    #[test]
    fn second_derivative_bounds() {
        let v = FourierPotential::single_mode(1, 0.03, 4);
        let (bound, sup) = v.second_derivative_sup();
        assert_abs_diff_eq!(bound, 0.06, epsilon = 1e-15);
        assert_abs_diff_eq!(sup, 0.06, epsilon = 1e-12);

        let v2 = FourierPotential::single_mode(2, 0.03, 4);
        let (bound2, _) = v2.second_derivative_sup();
        assert_abs_diff_eq!(bound2, 8.0 * 0.03, epsilon = 1e-15);
    }

    #[test]
    fn grid_sup_below_coefficient_bound() {
        let mut r = rng::stream(3);
        for _ in 0..20 {
            let coeffs: Vec<f64> = (0..9).map(|_| 0.01 * r.gen_range(-1.0..1.0)).collect();
            let v = FourierPotential::from_coeffs(coeffs).unwrap();
            let (bound, sup) = v.second_derivative_sup();
            assert!(sup <= bound + 1e-12);
        }
    }

    #[test]
    fn round_trip_grid_to_coeffs() {
        let mut r = rng::stream(4);
        let coeffs: Vec<f64> = (0..17).map(|_| r.gen_range(-0.1..0.1)).collect();
        let v = FourierPotential::from_coeffs(coeffs.clone()).unwrap();
        let back = FourierPotential::from_grid(&v.grid_values(4 * 16), 16).unwrap();
        for (a, b) in coeffs.iter().zip(back.coeffs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_property_of_norm() {
        let mut r = rng::stream(5);
        for _ in 0..20 {
            let a = FourierPotential::from_coeffs(
                (0..6).map(|_| 0.2 * r.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let b = FourierPotential::from_coeffs(
                (0..6).map(|_| 0.2 * r.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let ab = a.product(&b).unwrap();
            assert!(ab.norm(false) <= a.norm(false) * b.norm(false) + 1e-10);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let v = FourierPotential::from_coeffs(vec![0.1, 0.05, -0.02, 0.007]).unwrap();
        let h = 1e-6;
        let mut r = rng::stream(6);
        for _ in 0..100 {
            let phi: f64 = r.gen_range(0.0..2.0 * PI);
            let fd1 = (v.value(phi + h) - v.value(phi - h)) / (2.0 * h);
            let fd2 = (v.value(phi + h) - 2.0 * v.value(phi) + v.value(phi - h)) / (h * h);
            assert!((v.deriv(phi) - fd1).abs() <= 1e-6 * (1.0 + fd1.abs()));
            assert!((v.second_deriv(phi) - fd2).abs() <= 1e-3 * (1.0 + fd2.abs()));
        }
    }
}
