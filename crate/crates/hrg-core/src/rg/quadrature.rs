//! Gauss-Hermite and generalized Gauss-Laguerre rules (Golub-Welsch), with
//! log-domain Gaussian expectations so `exp(-W)` never overflows.

use crate::error::{CoreError, Result};
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    /// Log-weights, already normalized so that `logsumexp(log_w) = 0`,
    /// i.e. the rule integrates the probability density to one.
    pub log_weights: Vec<f64>,
}

fn golub_welsch(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut m = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = diag[i];
        if i + 1 < n {
            m[[i, i + 1]] = offdiag[i];
            m[[i + 1, i]] = offdiag[i];
        }
    }
    let (vals, vecs) = m.eigh(UPLO::Lower)?;
    let first_sq = (0..n).map(|i| vecs[[0, i]] * vecs[[0, i]]).collect();
    Ok((vals.to_vec(), first_sq))
}

fn hermite_rule(order: usize) -> Result<QuadRule> {
    // Weight e^{-t^2}: J has zero diagonal and offdiag sqrt(k/2).
    let diag = vec![0.0; order];
    let offdiag: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let (nodes, first_sq) = golub_welsch(&diag, &offdiag)?;
    // w_i = sqrt(pi) v_i^2; normalized to sum 1 they are just v_i^2.
    let log_weights = first_sq.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(QuadRule { nodes, log_weights })
}

fn laguerre_rule(order: usize, alpha: f64) -> Result<QuadRule> {
    // Weight u^alpha e^{-u} on [0, inf).
    let diag: Vec<f64> = (0..order).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let offdiag: Vec<f64> = (1..order).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect();
    let (nodes, first_sq) = golub_welsch(&diag, &offdiag)?;
    let log_weights = first_sq.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(QuadRule { nodes, log_weights })
}

type RuleCache = Mutex<HashMap<(usize, i64), QuadRule>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached Gauss-Hermite rule with probability-normalized weights.
pub fn hermite(order: usize) -> Result<QuadRule> {
    let key = (order, i64::MIN);
    if let Some(r) = cache().lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let r = hermite_rule(order)?;
    cache().lock().unwrap().insert(key, r.clone());
    Ok(r)
}

/// Cached generalized Gauss-Laguerre rule; `alpha` in units of 1/2.
pub fn laguerre_half(order: usize, alpha_halves: i64) -> Result<QuadRule> {
    let key = (order, alpha_halves);
    if let Some(r) = cache().lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let r = laguerre_rule(order, alpha_halves as f64 / 2.0)?;
    cache().lock().unwrap().insert(key, r.clone());
    Ok(r)
}

pub fn logsumexp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `-log E_{zeta ~ N(0, s2)}[exp(-w(zeta))]` with the given Hermite rule.
pub fn neg_log_gaussian_moment(rule: &QuadRule, w: &dyn Fn(f64) -> f64, s2: f64) -> f64 {
    let s = (2.0 * s2).sqrt();
    -logsumexp(
        rule.nodes
            .iter()
            .zip(&rule.log_weights)
            .map(|(&t, &lw)| lw - w(s * t)),
    )
}

/// `-log E[exp(-w(zeta_par, rho))]` where `zeta_par ~ N(0, s2)` and `rho` is
/// the radius of an (n-1)-dimensional Gaussian with per-component variance
/// `s2` (i.e. `rho^2 = 2 s2 u`, `u ~ Gamma((n-1)/2, 1)`).
pub fn neg_log_gaussian_moment_radial(
    hermite_rule: &QuadRule,
    laguerre_rule: &QuadRule,
    w: &dyn Fn(f64, f64) -> f64,
    s2: f64,
) -> f64 {
    let s = (2.0 * s2).sqrt();
    let mut terms = Vec::with_capacity(hermite_rule.nodes.len() * laguerre_rule.nodes.len());
    for (&t, &lwt) in hermite_rule.nodes.iter().zip(&hermite_rule.log_weights) {
        for (&u, &lwu) in laguerre_rule.nodes.iter().zip(&laguerre_rule.log_weights) {
            let rho = (2.0 * s2 * u).sqrt();
            terms.push(lwt + lwu - w(s * t, rho));
        }
    }
    -logsumexp(terms.into_iter())
}
