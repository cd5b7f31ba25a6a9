use serde::{Deserialize, Serialize};

use super::{Hamiltonian, SolveError};
use crate::spectral::{GridSpec, ScalarField};

/// The data of one ergodic problem together with the Lebesgue exponent under study.
#[derive(Debug, Clone)]
pub struct ErgodicProblem {
    pub f: ScalarField,
    pub hamiltonian: Hamiltonian,
    pub q: f64,
}

/// Which hypotheses on `q` hold for a problem. Solving is allowed either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    /// `q > d(γ−1)/γ` and `q > 1`.
    pub above_critical: bool,
    /// `q > 2`.
    pub above_two: bool,
}

impl Admissibility {
    pub fn holds(&self) -> bool {
        self.above_critical && self.above_two
    }
}

impl ErgodicProblem {
    pub fn new(f: ScalarField, hamiltonian: Hamiltonian, q: f64) -> Self {
        Self { f, hamiltonian, q }
    }

    pub fn grid(&self) -> &GridSpec {
        self.f.grid()
    }

    pub fn admissibility(&self) -> Admissibility {
        let d = self.grid().dim() as f64;
        let gamma = self.hamiltonian.gamma();
        Admissibility {
            above_critical: self.q > d * (gamma - 1.0) / gamma && self.q > 1.0,
            above_two: self.q > 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveSettings {
    /// Pseudo-time step; `None` selects [`SolveSettings::default_relax_dt`].
    pub relax_dt: Option<f64>,
    pub relax_tol: f64,
    pub newton_tol: f64,
    pub max_relax_steps: usize,
    pub max_newton_steps: usize,
    pub linear_tol: f64,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            relax_dt: None,
            relax_tol: 1e-4,
            newton_tol: 1e-10,
            max_relax_steps: 4000,
            max_newton_steps: 30,
            linear_tol: 1e-12,
        }
    }
}

impl SolveSettings {
    pub fn validate(&self) -> Result<(), SolveError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SolveError::Config(format!("{name} must be positive, got {v}")))
            }
        };
        if let Some(dt) = self.relax_dt {
            positive("relax_dt", dt)?;
        }
        positive("relax_tol", self.relax_tol)?;
        positive("newton_tol", self.newton_tol)?;
        positive("linear_tol", self.linear_tol)?;
        if self.max_relax_steps == 0 || self.max_newton_steps == 0 {
            return Err(SolveError::Config("iteration caps must be at least 1".into()));
        }
        Ok(())
    }

    /// `0.05 / (1 + ‖f‖_∞)`.
    ///
    /// The Laplacian is implicit, so the step only has to control the explicit
    /// Hamiltonian term and does not shrink with the mesh.
    pub fn default_relax_dt(f: &ScalarField) -> f64 {
        0.05 / (1.0 + f.max_abs())
    }

    pub fn effective_relax_dt(&self, f: &ScalarField) -> f64 {
        self.relax_dt
            .unwrap_or_else(|| Self::default_relax_dt(f))
    }
}

/// Mean-zero `u` with ergodic constant `λ` and convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicSolution {
    pub u: ScalarField,
    pub lambda: f64,
    pub residual_inf: f64,
    pub residual_l2: f64,
    pub relax_steps: usize,
    pub newton_steps: usize,
    pub converged: bool,
}
