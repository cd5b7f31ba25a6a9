//! Subcommand implementations. Each returns the process exit code on success
//! paths and a [`LabError`] (with its own exit code) otherwise.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hjlab_core::bernstein::{
    derive_exponents, geometric_k_grid, default_ibp_refinement, ibp_identity_residuals, level_field, pointwise_audit,
    quantile_levels, superlevel_curve, AuditReport, Exponents, IbpResidual,
};
use hjlab_core::counterexample::{
    critical_q, divergence_fit, log_radii, radial_residual, CutoffProfile, NormTable,
    QuadratureSettings, RadialProfile,
};
use hjlab_core::solver::persist::{load_solution, StoredSolution};
use hjlab_core::solver::{hopf_cole_residual, integral_identity_check, residual_field, ErgodicProblem};
use hjlab_core::spectral::SpectrumWorkspace;
use serde::Serialize;

use crate::manifest::{write_atomic, write_json, RunManifest};
use crate::runner::{
    build_hamiltonian, execute_run, exponents_for, run_ensemble, save_curve, write_aggregate,
    Ensemble,
};
use crate::source::GENERATOR;
use crate::{LabError, RunConfig};

/// Exit code for a completed command whose checks did not all pass.
pub const EXIT_CHECKS_FAILED: i32 = 1;

pub const TOL_RESIDUAL: f64 = 1e-8;
pub const TOL_INTEGRAL_IDENTITY: f64 = 1e-9;
pub const TOL_IBP_GAP: f64 = 1e-5;
pub const TOL_HOPF_COLE: f64 = 1e-7;
pub const TOL_RADIAL_RESIDUAL: f64 = 1e-10;
pub const AUDIT_QUANTILES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Progress messages on standard error unless quiet.
#[derive(Debug, Clone, Copy)]
pub struct Console {
    pub quiet: bool,
}

impl Console {
    pub fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn admissibility_warning(cfg: &RunConfig) -> Vec<String> {
    match exponents_for(cfg) {
        Ok(_) => Vec::new(),
        Err(reason) => vec![format!(
            "{reason}; the run proceeds without exponents or superlevel curves"
        )],
    }
}

fn manifest_base(cfg: &RunConfig, command: &str, threads: usize) -> RunManifest {
    RunManifest {
        tool: "hjlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        generator: GENERATOR.into(),
        threads,
        warnings: admissibility_warning(cfg),
        runs: Vec::new(),
        files: Vec::new(),
        total_seconds: 0.0,
        all_converged: false,
    }
}

/// Exponents JSON for `(γ, q, d)`.
pub fn cmd_params(gamma: f64, q: f64, dim: u32, delta: Option<f64>) -> Result<String, LabError> {
    let exps = derive_exponents(gamma, q, dim, delta)?;
    serde_json::to_string_pretty(&exps).map_err(|e| LabError::Io(e.to_string()))
}

/// One solve into `root`. Exit 0 iff converged, 3 otherwise.
pub fn cmd_solve(cfg: &RunConfig, root: &Path, console: Console) -> Result<i32, LabError> {
    let start = Instant::now();
    let grid = cfg.grid()?;
    let ws = SpectrumWorkspace::new(grid);
    fs::create_dir_all(root).map_err(|e| LabError::Io(format!("{}: {e}", root.display())))?;
    let mut manifest = manifest_base(cfg, "solve", 1);
    for w in &manifest.warnings {
        console.note(format!("warning: {w}"));
    }
    let result = execute_run(cfg, 0, cfg.seed, root, "", &ws);
    console.note(match &result.entry.error {
        Some(e) => format!("run 0: {:?}: {e}", result.entry.status),
        None => format!("run 0: converged in {:.2}s", result.entry.wall_seconds),
    });
    let converged = result.entry.converged;
    if let (Some(report), false) = (&result.entry.report, console.quiet) {
        eprintln!("lambda = {:.12e}, K = {:.6e}, M = {:.6e}", report.lambda, report.k, report.m);
    }
    manifest.runs.push(result.entry);
    manifest.all_converged = converged;
    manifest.total_seconds = start.elapsed().as_secs_f64();
    write_json(&root.join("manifest.json"), &manifest)?;
    Ok(if converged { 0 } else { 3 })
}

/// Ensemble into `root`: per-run directories, `aggregate.csv`, `envelope.csv`.
pub fn cmd_sweep(
    cfg: &RunConfig,
    root: &Path,
    threads: usize,
    console: Console,
) -> Result<i32, LabError> {
    let start = Instant::now();
    let mut manifest = manifest_base(cfg, "sweep", threads);
    for w in &manifest.warnings {
        console.note(format!("warning: {w}"));
    }
    let ensemble = run_ensemble(cfg, root, threads)?;
    for r in &ensemble.runs {
        console.note(match &r.entry.error {
            Some(e) => format!("run {}: {:?}: {e}", r.entry.run_index, r.entry.status),
            None => format!("run {}: converged in {:.2}s", r.entry.run_index, r.entry.wall_seconds),
        });
    }
    write_sweep_outputs(&ensemble, root, &mut manifest, console)?;
    manifest.total_seconds = start.elapsed().as_secs_f64();
    write_json(&root.join("manifest.json"), &manifest)?;
    Ok(if manifest.all_converged { 0 } else { 3 })
}

fn write_sweep_outputs(
    ensemble: &Ensemble,
    root: &Path,
    manifest: &mut RunManifest,
    console: Console,
) -> Result<(), LabError> {
    write_aggregate(&root.join("aggregate.csv"), &ensemble.rows())?;
    manifest.files.push("aggregate.csv".into());
    match ensemble.envelope() {
        Ok(env) => {
            let mut buf = Vec::new();
            env.write_csv(&mut buf)?;
            write_atomic(&root.join("envelope.csv"), &buf)?;
            manifest.files.push("envelope.csv".into());
        }
        Err(e) => {
            let msg = format!("no omega envelope: {e}");
            console.note(format!("warning: {msg}"));
            manifest.warnings.push(msg);
        }
    }
    manifest.runs = ensemble.runs.iter().map(|r| r.entry.clone()).collect();
    manifest.all_converged = ensemble.all_converged();
    console.note(format!("K_emp = {:.6e}", ensemble.k_emp()));
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CounterexampleArgs {
    pub gamma: f64,
    pub dim: u32,
    pub q: Option<f64>,
    pub eps: Vec<f64>,
    pub cutoff: CutoffProfile,
}

impl CounterexampleArgs {
    pub fn default_eps() -> Vec<f64> {
        (4..=9).map(|k| 2f64.powi(-k)).collect()
    }
}

/// Norm table with fit and radial residual, written to `root/norms.csv`.
pub fn cmd_counterexample(
    args: &CounterexampleArgs,
    root: &Path,
    console: Console,
) -> Result<i32, LabError> {
    let q = args.q.unwrap_or_else(|| critical_q(args.gamma, args.dim));
    let table = NormTable::compute(
        args.gamma,
        args.dim,
        q,
        &args.eps,
        args.cutoff,
        QuadratureSettings::default(),
    )?;
    let mut worst = 0.0f64;
    for &eps in &args.eps {
        let prof = RadialProfile::new(args.gamma, args.dim, eps, args.cutoff)?;
        let radii = log_radii(1e-3 * eps, 0.5, 1000);
        worst = worst.max(radial_residual(&prof, &radii).max_relative);
    }
    let fit = if table.rows.len() >= 4 {
        Some(divergence_fit(&table.rows)?)
    } else {
        None
    };
    fs::create_dir_all(root).map_err(|e| LabError::Io(format!("{}: {e}", root.display())))?;
    let mut buf = Vec::new();
    table.write_csv(
        &mut buf,
        fit.as_ref(),
        &[("q", q), ("radial_residual_max", worst)],
    )?;
    write_atomic(&root.join("norms.csv"), &buf)?;
    if let Some(fit) = &fit {
        console.note(format!(
            "slope = {:.6}, intercept = {:.6}, fit residual = {:.3e}",
            fit.slope, fit.intercept, fit.fit_residual
        ));
    }
    console.note(format!("max radial residual = {worst:.3e}"));
    // The radial check applies to the smooth cutoff only.
    if args.cutoff == CutoffProfile::Smooth && worst > TOL_RADIAL_RESIDUAL {
        return Ok(EXIT_CHECKS_FAILED);
    }
    Ok(0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditOutput {
    pub solution_dir: PathBuf,
    pub d: usize,
    pub n: usize,
    pub gamma: f64,
    pub q: f64,
    pub exponents: Option<Exponents>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub checks: Vec<CheckResult>,
    pub pointwise: Option<AuditReport>,
    pub ibp: Vec<IbpResidual>,
    pub all_passed: bool,
}

pub fn problem_from_stored(stored: &StoredSolution) -> Result<ErgodicProblem, LabError> {
    let rec = &stored.record;
    let h = build_hamiltonian(rec.gamma, rec.c1, rec.perturbation_amplitude, rec.grid.d)?;
    Ok(ErgodicProblem::new(stored.f.clone(), h, rec.q))
}

/// Runs every check on a stored solution.
pub fn audit_solution(dir: &Path, delta: Option<f64>) -> Result<AuditOutput, LabError> {
    let stored = load_solution(dir)?;
    let prob = problem_from_stored(&stored)?;
    let grid = *stored.grid();
    let ws = SpectrumWorkspace::new(grid);
    let sol = stored.solution();
    let mut checks = Vec::new();

    let residual = residual_field(&sol, &prob, &ws)?.max_abs();
    checks.push(CheckResult::at_most("residual_inf", residual, TOL_RESIDUAL));
    let identity = integral_identity_check(&sol, &prob, &ws)?;
    checks.push(CheckResult::at_most(
        "integral_identity",
        identity,
        TOL_INTEGRAL_IDENTITY,
    ));
    if prob.hamiltonian.is_unit_quadratic() {
        let hc = hopf_cole_residual(&sol, &prob, &ws)?;
        checks.push(CheckResult::at_most("hopf_cole", hc, TOL_HOPF_COLE));
    }

    let (exponents, skipped, pointwise, ibp) =
        match derive_exponents(stored.record.gamma, stored.record.q, grid.dim() as u32, delta) {
            Ok(exps) => {
                let report = pointwise_audit(&sol.u, &exps, &ws)?;
                for c in &report.checks {
                    // Violations are scaled by 1e-12 + 1e-10·scale, so the bound is 1.
                    checks.push(CheckResult {
                        name: format!("pointwise (scaled): {}", c.name),
                        value: c.max_scaled_violation.max(0.0),
                        tolerance: 1.0,
                        passed: c.passed,
                    });
                }
                let w = level_field(&sol.u, exps.delta, &ws)?;
                let ks = quantile_levels(&w, &AUDIT_QUANTILES)?;
                let refinement = default_ibp_refinement(&grid);
                let gaps = ibp_identity_residuals(&sol, &prob, &exps, &ks, refinement, &ws)?;
                for r in &gaps {
                    checks.push(CheckResult::at_most(
                        format!("ibp_gap k={:.6}", r.k),
                        r.relative_gap,
                        TOL_IBP_GAP,
                    ));
                }
                (Some(exps), None, Some(report), gaps)
            }
            Err(e) => (None, Some(format!("Bernstein checks skipped: {e}")), None, Vec::new()),
        };
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(AuditOutput {
        solution_dir: dir.to_path_buf(),
        d: grid.dim(),
        n: grid.n(),
        gamma: stored.record.gamma,
        q: stored.record.q,
        exponents,
        skipped,
        checks,
        pointwise,
        ibp,
        all_passed,
    })
}

/// Writes `audit.json` into `out` (default: the solution directory).
pub fn cmd_audit(
    dir: &Path,
    out: Option<&Path>,
    delta: Option<f64>,
    console: Console,
) -> Result<i32, LabError> {
    let audit = audit_solution(dir, delta)?;
    let target = out.unwrap_or(dir);
    fs::create_dir_all(target).map_err(|e| LabError::Io(format!("{}: {e}", target.display())))?;
    write_json(&target.join("audit.json"), &audit)?;
    for c in &audit.checks {
        console.note(format!(
            "{:<6} {} = {:.3e} (tolerance {:.1e})",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        ));
    }
    if let Some(reason) = &audit.skipped {
        console.note(reason);
    }
    Ok(if audit.all_passed { 0 } else { EXIT_CHECKS_FAILED })
}

#[derive(Debug, Clone)]
pub enum KSelection {
    Geometric {
        k_min: f64,
        k_max: f64,
        count: usize,
    },
    Explicit(Vec<f64>),
}

/// Re-emits `Y_k` for a stored solution as `out/curve.csv`.
pub fn cmd_curve(
    dir: &Path,
    out: Option<&Path>,
    ks: &KSelection,
    delta: Option<f64>,
) -> Result<i32, LabError> {
    let stored = load_solution(dir)?;
    let grid = *stored.grid();
    let exps = derive_exponents(stored.record.gamma, stored.record.q, grid.dim() as u32, delta)?;
    let k_grid = match ks {
        KSelection::Geometric { k_min, k_max, count } => geometric_k_grid(*k_min, *k_max, *count)?,
        KSelection::Explicit(v) => v.clone(),
    };
    let ws = SpectrumWorkspace::new(grid);
    let curve = superlevel_curve(&stored.solution(), &exps, &k_grid, &ws)?;
    let target = out.unwrap_or(dir);
    fs::create_dir_all(target).map_err(|e| LabError::Io(format!("{}: {e}", target.display())))?;
    save_curve(&target.join("curve.csv"), &curve)?;
    Ok(0)
}

/// Manifest of a finished command, for tests and tooling.
pub fn load_manifest(root: &Path) -> Result<RunManifest, LabError> {
    RunManifest::load(&root.join("manifest.json"))
}
