//! Regularity norms of a solved instance.

use hjlab_core::bernstein::Exponents;
use hjlab_core::solver::{ErgodicProblem, ErgodicSolution};
use hjlab_core::spectral::{gradient, laplacian, lq_norm, ScalarField, SpectrumWorkspace};
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub d: usize,
    pub n: usize,
    pub gamma: f64,
    pub q: f64,
    pub norm_lap_q: f64,
    pub norm_gradpow_q: f64,
    pub norm_du_l1: f64,
    /// `‖f − λ‖_q`.
    pub norm_f_eff_q: f64,
    pub norm_f_raw_q: f64,
    /// `‖f − λ‖_q + ‖Du‖_{L¹}`.
    #[serde(rename = "M")]
    pub m: f64,
    /// `‖Δu‖_q + ‖|Du|^γ‖_q`.
    #[serde(rename = "K")]
    pub k: f64,
    pub lambda: f64,
    pub exponents: Option<Exponents>,
    /// `max |u − u*|` for manufactured runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery_error: Option<f64>,
}

pub fn regularity_report(
    sol: &ErgodicSolution,
    prob: &ErgodicProblem,
    exponents: Option<Exponents>,
    ws: &SpectrumWorkspace,
) -> Result<RegularityReport, LabError> {
    let field = |e: hjlab_core::spectral::FieldError| LabError::Domain(e.to_string());
    let q = prob.q;
    let gamma = prob.hamiltonian.gamma();
    let grid = *sol.u.grid();
    let lap = laplacian(&sol.u, ws).map_err(field)?;
    let grad_norm = gradient(&sol.u, ws).map_err(field)?.norm_squared().map(f64::sqrt);
    let grad_pow = grad_norm.map(|g| g.powf(gamma));
    let f_eff = prob.f.shifted(-sol.lambda);

    let norm_lap_q = lq_norm(&lap, q).map_err(field)?;
    let norm_gradpow_q = lq_norm(&grad_pow, q).map_err(field)?;
    let norm_du_l1 = lq_norm(&grad_norm, 1.0).map_err(field)?;
    let norm_f_eff_q = lq_norm(&f_eff, q).map_err(field)?;
    let norm_f_raw_q = lq_norm(&prob.f, q).map_err(field)?;
    Ok(RegularityReport {
        d: grid.dim(),
        n: grid.n(),
        gamma,
        q,
        norm_lap_q,
        norm_gradpow_q,
        norm_du_l1,
        norm_f_eff_q,
        norm_f_raw_q,
        m: norm_f_eff_q + norm_du_l1,
        k: norm_lap_q + norm_gradpow_q,
        lambda: sol.lambda,
        exponents,
        recovery_error: None,
    })
}

/// `max |u − (u* − mean u*)|`.
pub fn recovery_error(u: &ScalarField, u_star: &ScalarField) -> Result<f64, LabError> {
    u.max_abs_diff(&u_star.centered())
        .map_err(|e| LabError::Domain(e.to_string()))
}
