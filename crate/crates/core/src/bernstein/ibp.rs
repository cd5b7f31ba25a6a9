//! Both sides of the integrated Bernstein identity on a solved instance.
//!
//! With `w = g(|Du|²)`, `w_k = (w − k)^+` and the test functions
//! `−2∂_j(g′ ∂_j u w_k^β)` summed over `j`, the equation gives
//!
//! ```text
//! β∫w_k^{β−1}|Dw_k|² + ∫(4g″|D²u Du|² + 2g′|D²u|²) w_k^β + ∫DH(Du)·Dw_k w_k^β
//!     = −2∫(f − λ) div(g′ Du w_k^β).
//! ```
//!
//! Every factor is evaluated pointwise from spectral derivatives and integrated
//! with the rectangle rule. `Dw = 2g′ D²u Du` by the chain rule, and the kink
//! of `(·)^+` is left unsmoothed. That kink limits the rectangle rule to a few
//! orders of accuracy, so the derivatives and `f` (trigonometric polynomials)
//! are first interpolated exactly onto a refined grid and the quadrature runs
//! there.

use serde::{Deserialize, Serialize};

use super::gfun::g_unchecked;
use super::{BernsteinError, Exponents};
use crate::solver::{ErgodicProblem, ErgodicSolution};
use crate::spectral::{gradient, hessian, GridSpec, Hessian, ScalarField, SpectrumWorkspace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbpResidual {
    pub k: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / max(|lhs|, |rhs|, 1)`.
    pub relative_gap: f64,
    /// Quadrature points per axis relative to the solution grid.
    pub refinement: usize,
}

/// The level function `w = g(|Du|²)` at every node.
pub fn level_field(
    u: &ScalarField,
    delta: f64,
    ws: &SpectrumWorkspace,
) -> Result<ScalarField, BernsteinError> {
    let s = gradient(u, ws)?.norm_squared();
    Ok(s.map(|s| g_unchecked(s, delta).g))
}

/// Levels `k = max(1, quantile_θ(w))` for each requested `θ ∈ [0, 1]`.
///
/// Quantiles use the nearest rank of the sorted node values.
pub fn quantile_levels(w: &ScalarField, quantiles: &[f64]) -> Result<Vec<f64>, BernsteinError> {
    let mut sorted = w.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    quantiles
        .iter()
        .map(|&theta| {
            if !(0.0..=1.0).contains(&theta) {
                return Err(BernsteinError::Domain(format!("quantile {theta} outside [0, 1]")));
            }
            let idx = ((sorted.len() - 1) as f64 * theta).round() as usize;
            Ok(sorted[idx].max(1.0))
        })
        .collect()
}

/// Largest number of quadrature nodes [`default_ibp_refinement`] will allow.
pub const IBP_NODE_BUDGET: usize = 1 << 22;

/// Quadrature refinement used by [`ibp_identity_residual`]: 8 per axis, halved
/// while the refined grid would exceed [`IBP_NODE_BUDGET`] nodes.
pub fn default_ibp_refinement(grid: &GridSpec) -> usize {
    let mut factor = 8;
    while factor > 1 && (factor * grid.n()).pow(grid.dim() as u32) > IBP_NODE_BUDGET {
        factor /= 2;
    }
    factor
}

/// [`ibp_identity_residuals`] at a single level with the default refinement.
pub fn ibp_identity_residual(
    sol: &ErgodicSolution,
    prob: &ErgodicProblem,
    exps: &Exponents,
    k: f64,
    ws: &SpectrumWorkspace,
) -> Result<IbpResidual, BernsteinError> {
    ibp_identity_residual_with(sol, prob, exps, k, default_ibp_refinement(ws.grid()), ws)
}

/// [`ibp_identity_residuals`] at a single level.
pub fn ibp_identity_residual_with(
    sol: &ErgodicSolution,
    prob: &ErgodicProblem,
    exps: &Exponents,
    k: f64,
    refinement: usize,
    ws: &SpectrumWorkspace,
) -> Result<IbpResidual, BernsteinError> {
    let mut out = ibp_identity_residuals(sol, prob, exps, &[k], refinement, ws)?;
    Ok(out.remove(0))
}

/// Both sides of the identity at every level in `ks`, integrated on a grid
/// with `refinement` (a power of two) times as many points per axis.
pub fn ibp_identity_residuals(
    sol: &ErgodicSolution,
    prob: &ErgodicProblem,
    exps: &Exponents,
    ks: &[f64],
    refinement: usize,
    ws: &SpectrumWorkspace,
) -> Result<Vec<IbpResidual>, BernsteinError> {
    if let Some(k) = ks.iter().find(|k| !(**k >= 1.0) || !k.is_finite()) {
        return Err(BernsteinError::Domain(format!("level k = {k} must be finite and ≥ 1")));
    }
    if !refinement.is_power_of_two() {
        return Err(BernsteinError::Domain(format!(
            "quadrature refinement {refinement} is not a power of two"
        )));
    }
    sol.u.grid().check_same(prob.grid())?;
    let mut fields: Vec<ScalarField> = gradient(&sol.u, ws)?.components().to_vec();
    fields.extend(hessian(&sol.u, ws)?.entries().iter().cloned());
    fields.push(prob.f.clone());
    let mut level = refinement;
    let mut chain: Option<SpectrumWorkspace> = None;
    while level > 1 {
        let current = chain.as_ref().unwrap_or(ws);
        fields = fields
            .iter()
            .map(|field| current.interpolate_fine(field))
            .collect::<Result<_, _>>()?;
        chain = Some(SpectrumWorkspace::new(current.fine_grid()));
        level /= 2;
    }
    let d = ws.grid().dim();
    let f = fields.pop().expect("source field");
    let hess = fields.split_off(d);
    let grad = fields;
    ks.iter()
        .map(|&k| Ok(integrate_level(&grad, &hess, &f, sol.lambda, prob, exps, k, refinement)))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn integrate_level(
    grad: &[ScalarField],
    hess: &[ScalarField],
    f: &ScalarField,
    lambda: f64,
    prob: &ErgodicProblem,
    exps: &Exponents,
    k: f64,
    refinement: usize,
) -> IbpResidual {
    let grid = *f.grid();
    let d = grid.dim();
    let beta = exps.beta;
    let delta = exps.delta;

    let mut p = vec![0.0; d];
    let mut full = vec![0.0; d * d];
    let mut hp = vec![0.0; d];
    let mut dh = vec![0.0; d];
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for flat in 0..grid.len() {
        for (pj, comp) in p.iter_mut().zip(grad) {
            *pj = comp.values()[flat];
        }
        let s: f64 = p.iter().map(|x| x * x).sum();
        let gv = g_unchecked(s, delta);
        let wk = gv.g - k;
        if wk <= 0.0 {
            continue;
        }
        for i in 0..d {
            for j in i..d {
                let v = hess[Hessian::packed_index(d, i, j)].values()[flat];
                full[i * d + j] = v;
                full[j * d + i] = v;
            }
        }
        for i in 0..d {
            hp[i] = (0..d).map(|j| full[i * d + j] * p[j]).sum();
        }
        let lap: f64 = (0..d).map(|i| full[i * d + i]).sum();
        let hess_sq: f64 = full.iter().map(|x| x * x).sum();
        let hp_sq: f64 = hp.iter().map(|x| x * x).sum();
        let p_hp: f64 = p.iter().zip(&hp).map(|(a, b)| a * b).sum();
        prob.hamiltonian.gradient(&p, &mut dh);
        let dh_hp: f64 = dh.iter().zip(&hp).map(|(a, b)| a * b).sum();

        let wk_beta = wk.powf(beta);
        let wk_beta1 = wk.powf(beta - 1.0);
        // Dw = 2g′·Hp, so |Dw|² = 4g′²|Hp|² and DH·Dw = 2g′ DH·Hp.
        let dw_sq = 4.0 * gv.dg * gv.dg * hp_sq;
        lhs += beta * wk_beta1 * dw_sq
            + (4.0 * gv.d2g * hp_sq + 2.0 * gv.dg * hess_sq) * wk_beta
            + 2.0 * gv.dg * dh_hp * wk_beta;

        let div = 2.0 * gv.d2g * p_hp * wk_beta
            + gv.dg * lap * wk_beta
            + beta * gv.dg * wk_beta1 * 2.0 * gv.dg * p_hp;
        let source = f.values()[flat] - lambda;
        rhs += -2.0 * source * div;
    }
    let vol = grid.cell_volume();
    lhs *= vol;
    rhs *= vol;
    IbpResidual {
        k,
        lhs,
        rhs,
        relative_gap: (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0),
        refinement,
    }
}
