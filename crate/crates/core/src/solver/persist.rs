//! Solution directories: `u.field`, `f.field` and `solution.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ErgodicSolution, SolveError, SolveSettings};
use crate::spectral::io::{load_field, save_field};
use crate::spectral::{FieldError, GridSpec, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounts {
    pub relax: usize,
    pub newton: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub d: usize,
    pub n: usize,
}

/// Contents of `solution.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub gamma: f64,
    pub q: f64,
    pub lambda: f64,
    pub residual_inf: f64,
    pub residual_l2: f64,
    pub steps: StepCounts,
    pub settings: SolveSettings,
    pub grid: GridRecord,
    pub converged: bool,
    #[serde(default = "one")]
    pub c1: f64,
    /// Amplitude of the `a·cos(|p|²)` perturbation, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_amplitude: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone)]
pub struct StoredSolution {
    pub record: SolutionRecord,
    pub u: ScalarField,
    pub f: ScalarField,
}

impl StoredSolution {
    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    pub fn solution(&self) -> ErgodicSolution {
        ErgodicSolution {
            u: self.u.clone(),
            lambda: self.record.lambda,
            residual_inf: self.record.residual_inf,
            residual_l2: self.record.residual_l2,
            relax_steps: self.record.steps.relax,
            newton_steps: self.record.steps.newton,
            converged: self.record.converged,
        }
    }
}

pub fn save_solution(
    dir: &Path,
    sol: &ErgodicSolution,
    f: &ScalarField,
    record: &SolutionRecord,
) -> Result<(), SolveError> {
    let io = |e: std::io::Error| SolveError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    save_field(&dir.join("u.field"), &sol.u).map_err(io)?;
    save_field(&dir.join("f.field"), f).map_err(io)?;
    let json = serde_json::to_string_pretty(record)
        .map_err(|e| SolveError::Io(format!("encoding solution.json: {e}")))?;
    fs::write(dir.join("solution.json"), json).map_err(io)?;
    Ok(())
}

pub fn load_solution(dir: &Path) -> Result<StoredSolution, SolveError> {
    let fmt = |e: FieldError| SolveError::Io(e.to_string());
    let u = load_field(&dir.join("u.field")).map_err(fmt)?;
    let f = load_field(&dir.join("f.field")).map_err(fmt)?;
    let path = dir.join("solution.json");
    let text = fs::read_to_string(&path)
        .map_err(|e| SolveError::Io(format!("{}: {e}", path.display())))?;
    let record: SolutionRecord = serde_json::from_str(&text)
        .map_err(|e| SolveError::Io(format!("{}: {e}", path.display())))?;
    if u.grid() != f.grid()
        || record.grid.d != u.grid().dim()
        || record.grid.n != u.grid().n()
    {
        return Err(SolveError::Io(format!(
            "{}: grids of u.field, f.field and solution.json disagree",
            dir.display()
        )));
    }
    Ok(StoredSolution { record, u, f })
}
