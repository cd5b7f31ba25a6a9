//! Residual and identity oracles for computed solutions.

use super::operator::ResidualMap;
use super::{ErgodicProblem, ErgodicSolution, SolveError};
use crate::spectral::{gradient, laplacian, nonlinear_eval, Oversample, ScalarField, SpectrumWorkspace};

/// `−Δu + H(Du) + λ − f` with the Hamiltonian evaluated on the refined grid.
pub fn residual_field(
    sol: &ErgodicSolution,
    prob: &ErgodicProblem,
    ws: &SpectrumWorkspace,
) -> Result<ScalarField, SolveError> {
    ResidualMap::new(ws, &prob.hamiltonian, &prob.f)?.residual(&sol.u, sol.lambda)
}

/// Oversampled `H(Du)` on the solution grid.
pub fn hamiltonian_field(
    u: &ScalarField,
    prob: &ErgodicProblem,
    ws: &SpectrumWorkspace,
) -> Result<ScalarField, SolveError> {
    let du = gradient(u, ws)?;
    let comps: Vec<&ScalarField> = du.components().iter().collect();
    let h = &prob.hamiltonian;
    Ok(nonlinear_eval(&comps, Oversample::Double, ws, |p| h.value(p))?)
}

/// `|mean(H(Du)) + λ − mean(f)|`; integrating the equation over the torus
/// kills the Laplacian, so this vanishes for exact solutions.
pub fn integral_identity_check(
    sol: &ErgodicSolution,
    prob: &ErgodicProblem,
    ws: &SpectrumWorkspace,
) -> Result<f64, SolveError> {
    let h = hamiltonian_field(&sol.u, prob, ws)?;
    Ok((h.mean() + sol.lambda - prob.f.mean()).abs())
}

/// `‖Δv − (f − λ)v‖_∞ / ‖v‖_∞` for `v = e^{−u}`, valid for `H(p) = |p|²` only.
pub fn hopf_cole_residual(
    sol: &ErgodicSolution,
    prob: &ErgodicProblem,
    ws: &SpectrumWorkspace,
) -> Result<f64, SolveError> {
    if !prob.hamiltonian.is_unit_quadratic() {
        return Err(SolveError::Domain(format!(
            "Hopf–Cole linearization needs H(p) = |p|², got gamma = {}, c1 = {}{}",
            prob.hamiltonian.gamma(),
            prob.hamiltonian.c1(),
            if prob.hamiltonian.perturbation().is_some() {
                " with perturbation"
            } else {
                ""
            }
        )));
    }
    let v = sol.u.map(|x| (-x).exp());
    let lap_v = laplacian(&v, ws)?;
    let lambda = sol.lambda;
    let mut worst = 0.0_f64;
    for ((lv, vv), f) in lap_v.values().iter().zip(v.values()).zip(prob.f.values()) {
        worst = worst.max((lv - (f - lambda) * vv).abs());
    }
    Ok(worst / v.max_abs())
}
