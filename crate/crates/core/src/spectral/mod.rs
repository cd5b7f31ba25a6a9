//! Periodic grids on `Q = (−1/2, 1/2)^d` with spectral calculus.
//!
//! Fourier convention: period 1, wavenumbers `2πm` with `m ∈ {−n/2,…,n/2−1}^d`.
//! All integrals over `Q` use the rectangle rule.

mod calculus;
mod field;
mod grid;
pub mod io;
mod nonlinear;
mod norms;
mod workspace;

use thiserror::Error;

pub use calculus::{gradient, hessian, laplacian};
pub use field::{Hessian, ScalarField, VectorField};
pub use grid::GridSpec;
pub use nonlinear::{nonlinear_eval, Oversample};
pub(crate) use nonlinear::apply_pointwise;
pub use norms::{linf_norm, lq_norm, superlevel_measure};
pub use workspace::{Spectrum, SpectrumWorkspace};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FieldError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("grid mismatch: expected {expected:?}, found {found:?}")]
    GridMismatch { expected: GridSpec, found: GridSpec },
    #[error("non-finite value {value} at node {node:?}")]
    NonFinite { node: Vec<usize>, value: f64 },
    #[error("nonlinear evaluation produced {value} at node {node:?} of {grid:?}")]
    Evaluation {
        node: Vec<usize>,
        grid: GridSpec,
        value: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("field file: {0}")]
    Format(String),
}
