//! Effective single-site potential of the Discrete Gaussian model,
//! `exp(-V(psi)) = sum_{n in 2 pi Z} exp(-beta (n - psi)^2 / 2)`,
//! together with the conditional site measure on `2 pi Z` and the conversion
//! to a Fourier-series potential.

use crate::error::{CoreError, Result};
use crate::potentials::FourierPotential;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DgData", into = "DgData")]
pub struct DgEffectivePotential {
    beta: f64,
    truncation: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DgData {
    beta: f64,
    truncation: usize,
}

impl TryFrom<DgData> for DgEffectivePotential {
    type Error = CoreError;
    fn try_from(d: DgData) -> Result<Self> {
        DgEffectivePotential::with_truncation(d.beta, d.truncation)
    }
}

impl From<DgEffectivePotential> for DgData {
    fn from(p: DgEffectivePotential) -> Self {
        DgData { beta: p.beta, truncation: p.truncation }
    }
}

impl DgEffectivePotential {
    /// Default truncation `K = ceil(6 / sqrt(beta)) + 2` keeps the dropped
    /// Gaussian tail below 1e-14.
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(CoreError::Parameter(format!("beta = {beta} must be > 0")));
        }
        let k = (6.0 / beta.sqrt()).ceil() as usize + 2;
        Self::with_truncation(beta, k)
    }

    pub fn with_truncation(beta: f64, truncation: usize) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(CoreError::Parameter(format!("beta = {beta} must be > 0")));
        }
        // Worst case over psi in [0, 2 pi): boundary term against the sum.
        let boundary = (-beta * (TWO_PI * truncation as f64 - PI).powi(2) / 2.0).exp();
        if boundary > 1e-14 {
            return Err(CoreError::Truncation(format!(
                "theta-sum cutoff K = {truncation} leaves tail {boundary:.2e} > 1e-14"
            )));
        }
        Ok(Self { beta, truncation })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Centered summation range for the theta sum at `psi`.
    fn terms(&self, psi: f64) -> impl Iterator<Item = f64> + '_ {
        let k0 = (psi / TWO_PI).round() as i64;
        let kk = self.truncation as i64;
        let beta = self.beta;
        (k0 - kk..=k0 + kk).map(move |k| {
            let d = TWO_PI * k as f64 - psi;
            -beta * d * d / 2.0
        })
    }

    pub fn value(&self, psi: f64) -> f64 {
        let logs: Vec<f64> = self.terms(psi).collect();
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = logs.iter().map(|l| (l - m).exp()).sum();
        -(m + s.ln())
    }

    pub fn deriv(&self, psi: f64) -> f64 {
        // V' = -S'/S with S = sum exp(-beta d^2/2), d = n - psi, S' = sum beta d exp(.)
        let k0 = (psi / TWO_PI).round() as i64;
        let kk = self.truncation as i64;
        let mut s = 0.0;
        let mut sp = 0.0;
        let m = self.terms(psi).fold(f64::NEG_INFINITY, f64::max);
        for k in k0 - kk..=k0 + kk {
            let d = TWO_PI * k as f64 - psi;
            let e = (-self.beta * d * d / 2.0 - m).exp();
            s += e;
            sp += self.beta * d * e;
        }
        -sp / s
    }

    pub fn second_deriv(&self, psi: f64) -> f64 {
        let k0 = (psi / TWO_PI).round() as i64;
        let kk = self.truncation as i64;
        let mut s = 0.0;
        let mut sp = 0.0;
        let mut spp = 0.0;
        let m = self.terms(psi).fold(f64::NEG_INFINITY, f64::max);
        for k in k0 - kk..=k0 + kk {
            let d = TWO_PI * k as f64 - psi;
            let e = (-self.beta * d * d / 2.0 - m).exp();
            s += e;
            sp += self.beta * d * e;
            spp += (self.beta * self.beta * d * d - self.beta) * e;
        }
        -spp / s + (sp / s).powi(2)
    }

    /// Normalized conditional weights `mu_psi(n)` for `n = 2 pi k`, truncated
    /// so the kept mass is at least `1 - 1e-12`.
    pub fn site_measure(&self, psi: f64) -> Result<Vec<(i64, f64)>> {
        let k0 = (psi / TWO_PI).round() as i64;
        let kk = self.truncation as i64;
        let m = self.terms(psi).fold(f64::NEG_INFINITY, f64::max);
        let mut entries = Vec::with_capacity(2 * self.truncation + 1);
        let mut z = 0.0;
        for k in k0 - kk..=k0 + kk {
            let d = TWO_PI * k as f64 - psi;
            let w = (-self.beta * d * d / 2.0 - m).exp();
            z += w;
            entries.push((k, w));
        }
        let boundary = entries.first().unwrap().1.max(entries.last().unwrap().1) / z;
        if boundary > 1e-12 {
            return Err(CoreError::Truncation(format!(
                "site measure boundary mass {boundary:.2e} > 1e-12"
            )));
        }
        for e in &mut entries {
            e.1 /= z;
        }
        Ok(entries)
    }
}

/// Fourier representation of the Discrete Gaussian effective potential:
/// `exp(-V)` has normalized coefficients `F^(q) = exp(-q^2 / (2 beta))`
/// (Poisson summation), so `V` is recovered as `-log F` on a circle grid.
pub fn dg_fourier(beta: f64, q_max: usize) -> Result<FourierPotential> {
    if !(beta > 0.0) {
        return Err(CoreError::Parameter(format!("beta = {beta} must be > 0")));
    }
    let m = 4 * (q_max + 1);
    let mut q_terms = q_max;
    while ((q_terms + 1) as f64).powi(2) / (2.0 * beta) < 42.0 {
        q_terms += 1;
    }
    let f = |phi: f64| {
        let mut s = 1.0;
        for q in 1..=q_terms {
            s += 2.0 * (-((q * q) as f64) / (2.0 * beta)).exp() * (q as f64 * phi).cos();
        }
        if s <= 0.0 {
            // theta functions are strictly positive; only rounding could
            // drive the truncated series negative
            f64::MIN_POSITIVE
        } else {
            s
        }
    };
    let values: Vec<f64> = (0..m).map(|k| -(f(TWO_PI * k as f64 / m as f64).ln())).collect();
    FourierPotential::from_grid(&values, q_max)
}
