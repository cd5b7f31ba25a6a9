use num_complex::Complex64;

use super::operator::ResidualMap;
use super::{ErgodicProblem, ErgodicSolution, SolveError, SolveSettings};
use crate::spectral::{ScalarField, SpectrumWorkspace};

/// Steps without a 0.1% improvement after which relaxation is considered stalled.
const STALL_WINDOW: usize = 500;

pub(crate) fn discrete_l2(values: &[f64], cell_volume: f64) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() * cell_volume).sqrt()
}

pub(crate) fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Semi-implicit pseudo-time relaxation of `u_t = Δu − H(Du) + f` from `u = 0`.
///
/// The Laplacian is treated implicitly through its Fourier multiplier and the
/// Hamiltonian explicitly on the refined grid. Each step removes the mean of `u`;
/// the removed drift rate is the running estimate `λ = mean(f − H(Du))`.
pub fn relax_to_steady(
    prob: &ErgodicProblem,
    settings: &SolveSettings,
    ws: &SpectrumWorkspace,
) -> Result<ErgodicSolution, SolveError> {
    relax_from(&ScalarField::zeros(*prob.grid()), prob, settings, ws)
}

pub fn relax_from(
    start: &ScalarField,
    prob: &ErgodicProblem,
    settings: &SolveSettings,
    ws: &SpectrumWorkspace,
) -> Result<ErgodicSolution, SolveError> {
    let map = ResidualMap::new(ws, &prob.hamiltonian, &prob.f)?;
    let dt = settings.effective_relax_dt(&prob.f);
    let f_spec = map.source_spectrum();
    let mut u_spec = ws.analyze(start.values());
    u_spec[0] = Complex64::new(0.0, 0.0);

    let mut best = f64::INFINITY;
    let mut last_improvement = 0;
    let mut steps = 0;
    let (lambda, residual) = loop {
        let (h_spec, _) = map
            .hamiltonian_term(&u_spec)
            .map_err(|_| SolveError::Divergence { step: steps, dt })?;
        let lambda = f_spec[0].re - h_spec[0].re;
        let mut r_spec: Vec<Complex64> = u_spec
            .iter()
            .zip(&h_spec)
            .zip(f_spec)
            .enumerate()
            .map(|(flat, ((&u, &h), &f))| -ws.laplacian_multiplier(flat) * u + h - f)
            .collect();
        r_spec[0] += lambda;
        let residual = ws.synthesize(&r_spec);
        let r_inf = max_abs(&residual);
        if !r_inf.is_finite() {
            return Err(SolveError::Divergence { step: steps, dt });
        }
        if r_inf <= settings.relax_tol || steps >= settings.max_relax_steps {
            break (lambda, residual);
        }
        if r_inf < best * (1.0 - 1e-3) {
            best = r_inf;
            last_improvement = steps;
        } else if steps - last_improvement > STALL_WINDOW {
            break (lambda, residual);
        }
        for (flat, (u, (&h, &f))) in u_spec.iter_mut().zip(h_spec.iter().zip(f_spec)).enumerate() {
            *u = (*u + dt * (f - h)) / (1.0 - dt * ws.laplacian_multiplier(flat));
        }
        u_spec[0] = Complex64::new(0.0, 0.0);
        steps += 1;
    };

    let u = ScalarField::from_raw(*ws.grid(), ws.synthesize(&u_spec)).centered();
    let residual_inf = max_abs(&residual);
    Ok(ErgodicSolution {
        u,
        lambda,
        residual_inf,
        residual_l2: discrete_l2(&residual, ws.grid().cell_volume()),
        relax_steps: steps,
        newton_steps: 0,
        converged: residual_inf <= settings.newton_tol,
    })
}
