use num_complex::Complex64;

use super::krylov::gmres;
use super::operator::{Evaluation, ResidualMap};
use super::relax::{discrete_l2, max_abs};
use super::{ErgodicProblem, ErgodicSolution, SolveError, SolveSettings};
use crate::spectral::{ScalarField, SpectrumWorkspace};

const GMRES_RESTART: usize = 60;
const GMRES_MAX_ITER: usize = 600;
/// Full step followed by this many halvings.
const DAMPED_ATTEMPTS: usize = 3;

struct Iterate {
    u: Vec<f64>,
    lambda: f64,
    eval: Evaluation,
    r_inf: f64,
    r_l2: f64,
}

impl Iterate {
    fn new(map: &ResidualMap, u: Vec<f64>, lambda: f64) -> Option<Self> {
        let ws = map.workspace();
        let spec = ws.analyze(&u);
        let eval = map.evaluate_spectrum(&spec, lambda).ok()?;
        let r_inf = max_abs(&eval.residual);
        if !r_inf.is_finite() {
            return None;
        }
        let r_l2 = discrete_l2(&eval.residual, ws.grid().cell_volume());
        Some(Self {
            u,
            lambda,
            eval,
            r_inf,
            r_l2,
        })
    }

    fn into_solution(self, seed: &ErgodicSolution, steps: usize, tol: f64, grid: &crate::spectral::GridSpec) -> ErgodicSolution {
        ErgodicSolution {
            u: ScalarField::from_raw(*grid, self.u),
            lambda: self.lambda,
            residual_inf: self.r_inf,
            residual_l2: self.r_l2,
            relax_steps: seed.relax_steps,
            newton_steps: steps,
            converged: self.r_inf <= tol,
        }
    }
}

fn centered(mut u: Vec<f64>) -> Vec<f64> {
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    u.iter_mut().for_each(|v| *v -= mean);
    u
}

/// Newton iteration on `F(u, λ) = (R(u, λ), mean u)` with matrix-free GMRES,
/// right-preconditioned by `(−Δ + I)^{-1}` on nonzero modes.
pub fn newton_refine(
    seed: &ErgodicSolution,
    prob: &ErgodicProblem,
    settings: &SolveSettings,
    ws: &SpectrumWorkspace,
) -> Result<ErgodicSolution, SolveError> {
    let map = ResidualMap::new(ws, &prob.hamiltonian, &prob.f)?;
    ws.grid().check_same(seed.u.grid())?;
    let grid = *ws.grid();
    let n = grid.len();
    let tol = settings.newton_tol;

    let mut current = Iterate::new(&map, centered(seed.u.values().to_vec()), seed.lambda)
        .ok_or(SolveError::Divergence { step: 0, dt: 0.0 })?;
    let mut steps = 0;
    loop {
        if current.r_inf <= tol {
            return Ok(current.into_solution(seed, steps, tol, &grid));
        }
        if steps >= settings.max_newton_steps {
            return Err(SolveError::NonConvergence {
                reason: format!("newton step cap {} reached", settings.max_newton_steps),
                best: Box::new(current.into_solution(seed, steps, tol, &grid)),
            });
        }

        let lin = map.linearize_from_gradient(&current.eval.fine_gradient);
        let mut rhs: Vec<f64> = current.eval.residual.iter().map(|r| -r).collect();
        rhs.push(0.0);
        let apply = |x: &[f64], out: &mut [f64]| {
            let spec = ws.analyze(&x[..n]);
            let image = ws.synthesize(&lin.apply_spectrum(&spec, x[n]));
            out[..n].copy_from_slice(&image);
            out[n] = spec[0].re;
        };
        let precond = |r: &[f64], out: &mut [f64]| {
            let mut spec = ws.analyze(&r[..n]);
            let mu = spec[0].re;
            for (flat, c) in spec.iter_mut().enumerate().skip(1) {
                *c /= 1.0 - ws.laplacian_multiplier(flat);
            }
            spec[0] = Complex64::new(r[n], 0.0);
            out[..n].copy_from_slice(&ws.synthesize(&spec));
            out[n] = mu;
        };
        let mut step = vec![0.0; n + 1];
        let linear = gmres(
            apply,
            precond,
            &rhs,
            &mut step,
            settings.linear_tol,
            GMRES_RESTART,
            GMRES_MAX_ITER,
        );

        let mut accepted = None;
        let mut alpha = 1.0;
        for _ in 0..=DAMPED_ATTEMPTS {
            let trial_u: Vec<f64> = current
                .u
                .iter()
                .zip(&step[..n])
                .map(|(u, du)| u + alpha * du)
                .collect();
            let trial_lambda = current.lambda + alpha * step[n];
            if let Some(trial) = Iterate::new(&map, centered(trial_u), trial_lambda) {
                if trial.r_l2 < current.r_l2 {
                    accepted = Some(trial);
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some(next) => {
                current = next;
                steps += 1;
            }
            None => {
                return Err(SolveError::NonConvergence {
                    reason: format!(
                        "residual did not decrease over {DAMPED_ATTEMPTS} damped attempts \
                         (residual_inf = {:e}; last linear solve: {} iterations, relative residual {:e}{})",
                        current.r_inf,
                        linear.iterations,
                        linear.relative_residual,
                        if linear.converged { "" } else { ", not converged" }
                    ),
                    best: Box::new(current.into_solution(seed, steps, tol, &grid)),
                })
            }
        }
    }
}
