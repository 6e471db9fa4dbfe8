//! Error taxonomy shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("scale {scale} out of range {lo}..={hi}")]
    ScaleOutOfRange { scale: usize, lo: usize, hi: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("capacity exceeded: {what} = {got} > {max}")]
    Capacity {
        what: &'static str,
        got: usize,
        max: usize,
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("grid resolution insufficient: {0}")]
    Resolution(String),

    #[error("truncation insufficient: {0}")]
    Truncation(String),

    #[error("dynamics diverged (|phi| > {0:.1e}); reduce the step size")]
    Instability(f64),

    #[error("certificate invalid: epsilon = {0} >= 1")]
    InvalidCertificate(f64),

    #[error("critical-point tuning failed: {0}")]
    TuneFailed(String),

    #[error("linear algebra backend error: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for CoreError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        CoreError::Linalg(e.to_string())
    }
}
