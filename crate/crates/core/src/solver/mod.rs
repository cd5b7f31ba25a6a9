//! Ergodic solutions of `−Δu + H(Du) + λ = f` with `mean(u) = 0`.
//!
//! Integrating the equation over the torus forces `mean(H(Du)) + λ = mean(f)`,
//! so a generic source is only solvable together with the constant `λ`. The
//! pair is computed by semi-implicit relaxation (a robust seed) followed by
//! Newton–Krylov refinement (tight residuals).

mod checks;
mod hamiltonian;
mod krylov;
mod newton;
mod operator;
pub mod persist;
mod problem;
mod relax;

use thiserror::Error;

pub use checks::{hamiltonian_field, hopf_cole_residual, integral_identity_check, residual_field};
pub use hamiltonian::{Hamiltonian, Perturbation};
pub use newton::newton_refine;
pub use operator::{Linearization, ResidualMap};
pub use problem::{Admissibility, ErgodicProblem, ErgodicSolution, SolveSettings};
pub use relax::{relax_from, relax_to_steady};

use crate::spectral::{FieldError, SpectrumWorkspace};

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("relaxation diverged at step {step} (dt = {dt:e}); retry with a smaller relax_dt")]
    Divergence { step: usize, dt: f64 },
    #[error("newton did not converge: {reason}")]
    NonConvergence {
        reason: String,
        best: Box<ErgodicSolution>,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Retries with a quartered step after a blow-up, when the step was chosen automatically.
const AUTO_DT_RETRIES: usize = 3;

/// Relaxation followed by Newton refinement.
pub fn solve(
    prob: &ErgodicProblem,
    settings: &SolveSettings,
    ws: &SpectrumWorkspace,
) -> Result<ErgodicSolution, SolveError> {
    settings.validate()?;
    ws.grid().check_same(prob.grid())?;
    let mut attempt = *settings;
    let mut retries = if settings.relax_dt.is_none() { AUTO_DT_RETRIES } else { 0 };
    let seed = loop {
        match relax_to_steady(prob, &attempt, ws) {
            Err(SolveError::Divergence { dt, .. }) if retries > 0 => {
                retries -= 1;
                attempt.relax_dt = Some(0.25 * dt);
            }
            other => break other?,
        }
    };
    newton_refine(&seed, prob, settings, ws)
}
