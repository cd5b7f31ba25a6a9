//! Computable skeleton of the Bernstein-type estimate.
//!
//! Exponent bookkeeping, the level function `g`, pointwise audits of the
//! algebraic inequalities, the integrated identity obtained from the
//! `−2∂_j(g′ ∂_j u w_k^β)` test functions, the superlevel functional `Y_k`,
//! the alternative for `F(Z) = Z^θ − Z`, and an empirical envelope of the
//! superlevel excess.

mod alternative;
mod audit;
mod envelope;
mod exponents;
mod gfun;
mod ibp;
mod superlevel;

pub use alternative::{alternative_roots, f_alternative, k_star, Alternative};
pub use audit::{
    audit_g_samples, defect_fields, g_defects, inequality_defects, pointwise_audit, AuditReport,
    InequalityCheck, AUDIT_ABS_TOL, AUDIT_REL_TOL, INEQUALITY_NAMES,
};
pub use envelope::{omega_envelope, OmegaEnvelope};
pub use exponents::{derive_exponents, derive_exponents_in, ExponentField, Exponents, ExponentsOf};
pub use gfun::{g_eval, g_property_slack, GValues};
pub use ibp::{
    default_ibp_refinement, ibp_identity_residual, ibp_identity_residual_with, ibp_identity_residuals,
    level_field, quantile_levels, IbpResidual, IBP_NODE_BUDGET,
};
pub use superlevel::{
    default_k_grid, geometric_k_grid, superlevel_curve, superlevel_curve_from_gradient,
    y_functional, SuperlevelCurve,
};

use thiserror::Error;

use crate::solver::SolveError;
use crate::spectral::FieldError;

#[derive(Debug, Error)]
pub enum BernsteinError {
    #[error("inadmissible exponents: {0}")]
    Admissibility(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no roots: ω = {omega} is not below F* = {f_star}")]
    NoRoots { omega: f64, f_star: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
