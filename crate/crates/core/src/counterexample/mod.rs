//! Explicit radial solutions showing the estimate fails at `q = d(γ−1)/γ`.
//!
//! `f_ε` keeps a fixed `L^q` norm as `ε → 0` while `‖|Dv_ε|^γ‖_q^q` grows like
//! `|c|^{γq} σ_{d−1} ln(1/ε)`.

mod cutoff;
mod norms;
mod profile;
mod quadrature;

pub use cutoff::{psi, psi_derivative, CutoffProfile};
pub use norms::{ball_norms, divergence_fit, DivergenceFit, NormRow, NormTable};
pub use profile::{
    c_constant, critical_q, log_radii, profile_eval, radial_residual, sphere_area, RadialProfile,
    RadialResidual, RadialValues,
};
pub use quadrature::{integrate, integrate_pieces, QuadratureSettings};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CounterexampleError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature reached relative error {achieved:e}, requested {requested:e}")]
    Precision { requested: f64, achieved: f64 },
}
