//! Numerical laboratory for hierarchical spin systems: block-spin geometry,
//! renormalised-potential flows, recursive Brascamp–Lieb gap certificates,
//! Glauber/Langevin dynamics, and the brute-force oracles that validate them.
//!
//! The crate is organised around the pipeline
//!
//! ```text
//! lattice  ->  potentials  ->  rg (flow)  ->  certificate (gap lower bound)
//!                                   \->  dynamics (empirical gap)  <- oracle
//! ```
//!
//! Everything is deterministic given an explicit seed; the `oracle` module
//! deliberately shares no operator code with the matrix-free paths it checks.

pub mod certificate;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod potentials;
pub mod rg;
pub mod rng;

pub use error::{CoreError, Result};
pub use lattice::{CovarianceDecomposition, CovarianceMode, FieldVector, HierLattice};
