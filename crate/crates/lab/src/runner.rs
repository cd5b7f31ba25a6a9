//! Single solves and seeded ensembles.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hjlab_core::bernstein::{
    default_k_grid, derive_exponents, omega_envelope, superlevel_curve_from_gradient, Exponents,
    OmegaEnvelope, SuperlevelCurve,
};
use hjlab_core::solver::persist::{save_solution, GridRecord, SolutionRecord, StepCounts};
use hjlab_core::solver::{
    solve, ErgodicProblem, ErgodicSolution, Hamiltonian, Perturbation, ResidualMap, SolveError,
};
use hjlab_core::spectral::{gradient, GridSpec, ScalarField, SpectrumWorkspace};
use rayon::prelude::*;
use serde::Serialize;

use crate::manifest::{write_json, RunEntry, RunStatus};
use crate::report::{recovery_error, regularity_report, RegularityReport};
use crate::source::{generate_source, unit_band_limited};
use crate::{LabError, RunConfig};

/// Sup norm of the manufactured `u*`.
pub const MANUFACTURED_AMPLITUDE: f64 = 0.1;

pub fn build_hamiltonian(
    gamma: f64,
    c1: f64,
    perturbation: Option<f64>,
    d: usize,
) -> Result<Hamiltonian, LabError> {
    let mut h = Hamiltonian::power(gamma)?.with_c1(c1)?;
    if let Some(a) = perturbation {
        h = h.with_perturbation(Perturbation::bounded_cosine(a), d)?;
    }
    Ok(h)
}

/// Exponents for the configured `(γ, q, d)`, or the reason they do not exist.
pub fn exponents_for(cfg: &RunConfig) -> Result<Exponents, String> {
    derive_exponents(cfg.gamma, cfg.q, cfg.dimension as u32, cfg.delta.explicit())
        .map_err(|e| e.to_string())
}

/// Problem for one seed; manufactured configs also return `u*`.
pub fn build_problem(
    cfg: &RunConfig,
    seed: u64,
    ws: &SpectrumWorkspace,
) -> Result<(ErgodicProblem, Option<ScalarField>), LabError> {
    let grid = *ws.grid();
    let h = build_hamiltonian(cfg.gamma, cfg.c1, cfg.perturbation_amplitude, grid.dim())?;
    if cfg.manufactured {
        let raw = unit_band_limited(seed, cfg.band_limit, grid, ws)?;
        let u_star = raw.scaled(MANUFACTURED_AMPLITUDE / raw.max_abs());
        let f = ResidualMap::new(ws, &h, &ScalarField::zeros(grid))?.residual(&u_star, 0.0)?;
        Ok((ErgodicProblem::new(f, h, cfg.q), Some(u_star)))
    } else {
        let f = generate_source(seed, cfg.band_limit, cfg.m_target, cfg.q, grid, ws)?;
        Ok((ErgodicProblem::new(f, h, cfg.q), None))
    }
}

/// Everything one run produced, kept in memory for aggregation.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub entry: RunEntry,
    pub solution: Option<ErgodicSolution>,
    pub curve: Option<SuperlevelCurve>,
}

fn record_for(cfg: &RunConfig, sol: &ErgodicSolution, grid: &GridSpec) -> SolutionRecord {
    SolutionRecord {
        gamma: cfg.gamma,
        q: cfg.q,
        lambda: sol.lambda,
        residual_inf: sol.residual_inf,
        residual_l2: sol.residual_l2,
        steps: StepCounts {
            relax: sol.relax_steps,
            newton: sol.newton_steps,
        },
        settings: cfg.solver,
        grid: GridRecord {
            d: grid.dim(),
            n: grid.n(),
        },
        converged: sol.converged,
        c1: cfg.c1,
        perturbation_amplitude: cfg.perturbation_amplitude,
    }
}

/// Writes a curve as CSV.
pub fn save_curve(path: &Path, curve: &SuperlevelCurve) -> Result<(), LabError> {
    let mut buf = Vec::new();
    curve.write_csv(&mut buf)?;
    fs::write(path, buf).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
}

pub fn curve_for(
    sol: &ErgodicSolution,
    exps: &Exponents,
    cfg: &RunConfig,
    ws: &SpectrumWorkspace,
) -> Result<SuperlevelCurve, LabError> {
    let grad = gradient(&sol.u, ws).map_err(|e| LabError::Domain(e.to_string()))?;
    let k = &cfg.k_grid;
    let grid = default_k_grid(&grad.norm_squared(), exps.delta, k.k_min, k.k_max_factor, k.count)?;
    Ok(superlevel_curve_from_gradient(&grad, exps, &grid)?)
}

/// Solves one seed and stores the solution directory under `root/rel_dir`.
pub fn execute_run(
    cfg: &RunConfig,
    run_index: usize,
    seed: u64,
    root: &Path,
    rel_dir: &str,
    ws: &SpectrumWorkspace,
) -> RunResult {
    let start = Instant::now();
    let dir = if rel_dir.is_empty() {
        root.to_path_buf()
    } else {
        root.join(rel_dir)
    };
    let mut entry = RunEntry {
        run_index,
        seed,
        dir: if rel_dir.is_empty() { ".".into() } else { rel_dir.into() },
        files: Vec::new(),
        wall_seconds: 0.0,
        status: RunStatus::Failed,
        converged: false,
        error: None,
        report: None,
    };
    let outcome = run_inner(cfg, seed, &dir, rel_dir, ws, &mut entry);
    entry.wall_seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok((solution, curve)) => RunResult {
            entry,
            solution,
            curve,
        },
        Err(e) => {
            entry.error = Some(e.to_string());
            RunResult {
                entry,
                solution: None,
                curve: None,
            }
        }
    }
}

type RunOutput = (Option<ErgodicSolution>, Option<SuperlevelCurve>);

fn run_inner(
    cfg: &RunConfig,
    seed: u64,
    dir: &Path,
    rel_dir: &str,
    ws: &SpectrumWorkspace,
    entry: &mut RunEntry,
) -> Result<RunOutput, LabError> {
    let (prob, u_star) = build_problem(cfg, seed, ws)?;
    let sol = match solve(&prob, &cfg.solver, ws) {
        Ok(sol) => {
            entry.status = RunStatus::Converged;
            sol
        }
        Err(SolveError::NonConvergence { reason, best }) => {
            entry.status = RunStatus::NotConverged;
            entry.error = Some(reason);
            *best
        }
        Err(e @ SolveError::Divergence { .. }) => {
            entry.status = RunStatus::Diverged;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    entry.converged = sol.converged;

    let grid = *ws.grid();
    let rel = |name: &str| {
        if rel_dir.is_empty() {
            name.to_string()
        } else {
            format!("{rel_dir}/{name}")
        }
    };
    save_solution(dir, &sol, &prob.f, &record_for(cfg, &sol, &grid))?;
    entry.files.extend(["u.field", "f.field", "solution.json"].map(rel));

    let exps = exponents_for(cfg).ok();
    let mut report = regularity_report(&sol, &prob, exps.clone(), ws)?;
    if let Some(u_star) = &u_star {
        report.recovery_error = Some(recovery_error(&sol.u, u_star)?);
    }
    write_json(&dir.join("report.json"), &report)?;
    entry.files.push(rel("report.json"));
    entry.report = Some(report);

    let curve = match &exps {
        Some(exps) => {
            let curve = curve_for(&sol, exps, cfg, ws)?;
            save_curve(&dir.join("curve.csv"), &curve)?;
            entry.files.push(rel("curve.csv"));
            Some(curve)
        }
        None => None,
    };
    Ok((Some(sol), curve))
}

/// One row of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub run_index: usize,
    pub seed: u64,
    pub lambda: f64,
    pub norm_f_eff: f64,
    pub norm_du_l1: f64,
    #[serde(rename = "M_emp")]
    pub m_emp: f64,
    pub norm_lap_q: f64,
    pub norm_gradpow_q: f64,
    #[serde(rename = "K_emp_run")]
    pub k_emp_run: f64,
    pub converged: bool,
}

impl AggregateRow {
    pub fn from_report(entry: &RunEntry, report: &RegularityReport) -> Self {
        Self {
            run_index: entry.run_index,
            seed: entry.seed,
            lambda: report.lambda,
            norm_f_eff: report.norm_f_eff_q,
            norm_du_l1: report.norm_du_l1,
            m_emp: report.m,
            norm_lap_q: report.norm_lap_q,
            norm_gradpow_q: report.norm_gradpow_q,
            k_emp_run: report.k,
            converged: entry.converged,
        }
    }
}

pub const AGGREGATE_HEADER: [&str; 10] = [
    "run_index",
    "seed",
    "lambda",
    "norm_f_eff",
    "norm_du_l1",
    "M_emp",
    "norm_lap_q",
    "norm_gradpow_q",
    "K_emp_run",
    "converged",
];

/// Reals are written with 17 significant digits.
pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<(), LabError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(AGGREGATE_HEADER)?;
    let real = |x: f64| format!("{x:.16e}");
    for r in rows {
        w.write_record([
            r.run_index.to_string(),
            r.seed.to_string(),
            real(r.lambda),
            real(r.norm_f_eff),
            real(r.norm_du_l1),
            real(r.m_emp),
            real(r.norm_lap_q),
            real(r.norm_gradpow_q),
            real(r.k_emp_run),
            r.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// An ensemble in memory: per-run results sorted by index.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub runs: Vec<RunResult>,
    pub threads: usize,
}

impl Ensemble {
    pub fn rows(&self) -> Vec<AggregateRow> {
        self.runs
            .iter()
            .filter_map(|r| {
                r.entry
                    .report
                    .as_ref()
                    .map(|rep| AggregateRow::from_report(&r.entry, rep))
            })
            .collect()
    }

    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(|r| r.entry.converged)
    }

    /// `max_i (‖Δu_i‖_q + ‖|Du_i|^γ‖_q)` over converged runs.
    pub fn k_emp(&self) -> f64 {
        self.rows()
            .iter()
            .filter(|r| r.converged)
            .map(|r| r.k_emp_run)
            .fold(0.0, f64::max)
    }

    /// Pooled envelope over the curves of converged runs, in run order.
    pub fn envelope(&self) -> Result<OmegaEnvelope, LabError> {
        let labels: Vec<String> = self
            .runs
            .iter()
            .map(|r| format!("run {} (seed {})", r.entry.run_index, r.entry.seed))
            .collect();
        let curves: Vec<(&str, &SuperlevelCurve)> = self
            .runs
            .iter()
            .zip(&labels)
            .filter(|(r, _)| r.entry.converged)
            .filter_map(|(r, l)| r.curve.as_ref().map(|c| (l.as_str(), c)))
            .collect();
        Ok(omega_envelope(&curves)?)
    }
}

pub fn run_dir_name(index: usize) -> String {
    format!("run_{index:04}")
}

/// Runs seeds `seed + i` for `i < ensemble_size` on a pool of `threads` workers.
pub fn run_ensemble(cfg: &RunConfig, root: &Path, threads: usize) -> Result<Ensemble, LabError> {
    let grid = cfg.grid()?;
    let ws = SpectrumWorkspace::new(grid);
    fs::create_dir_all(root).map_err(|e| LabError::Io(format!("{}: {e}", root.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    let mut runs: Vec<RunResult> = pool.install(|| {
        (0..cfg.ensemble_size)
            .into_par_iter()
            .map(|i| {
                let seed = cfg.seed.wrapping_add(i as u64);
                execute_run(cfg, i, seed, root, &run_dir_name(i), &ws)
            })
            .collect()
    });
    runs.sort_by_key(|r| r.entry.run_index);
    Ok(Ensemble { runs, threads })
}

/// Resolves the output directory: the command-line override wins.
pub fn output_root(cfg: &RunConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output_dir.clone())
}
