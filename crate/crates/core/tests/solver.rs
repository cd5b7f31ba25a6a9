use std::f64::consts::PI;

use hjlab_core::solver::{
    hopf_cole_residual, integral_identity_check, newton_refine, relax_to_steady, residual_field,
    solve, ErgodicProblem, ErgodicSolution, Hamiltonian, Perturbation, ResidualMap, SolveError,
    SolveSettings,
};
use hjlab_core::spectral::{GridSpec, ScalarField, SpectrumWorkspace};

/// Source whose discrete solution is exactly `u_star` with `λ = 0`.
fn manufactured_source(u_star: &ScalarField, h: &Hamiltonian, ws: &SpectrumWorkspace) -> ScalarField {
    let zero = ScalarField::zeros(*ws.grid());
    ResidualMap::new(ws, h, &zero).unwrap().residual(u_star, 0.0).unwrap()
}

fn u_star_1d(g: GridSpec) -> ScalarField {
    ScalarField::from_fn(g, |x| 0.1 * (2.0 * PI * x[0]).cos())
}

fn u_star_2d(g: GridSpec) -> ScalarField {
    ScalarField::from_fn(g, |x| {
        0.1 * (2.0 * PI * x[0]).cos() + 0.05 * (2.0 * PI * (x[0] + 2.0 * x[1])).sin()
            - 0.03 * (4.0 * PI * x[1]).cos()
    })
}

#[test]
fn zero_source_is_a_fixed_point() {
    let g = GridSpec::new(2, 16).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let prob = ErgodicProblem::new(ScalarField::zeros(g), Hamiltonian::power(3.0).unwrap(), 4.0);
    let relaxed = relax_to_steady(&prob, &SolveSettings::default(), &ws).unwrap();
    assert_eq!(relaxed.residual_inf, 0.0);
    assert_eq!(relaxed.lambda, 0.0);
    assert_eq!(relaxed.u.max_abs(), 0.0);
    let refined = newton_refine(&relaxed, &prob, &SolveSettings::default(), &ws).unwrap();
    assert_eq!(refined.newton_steps, 0);
    assert_eq!(refined, relaxed);
    assert_eq!(integral_identity_check(&refined, &prob, &ws).unwrap(), 0.0);
    assert_eq!(residual_field(&refined, &prob, &ws).unwrap().max_abs(), 0.0);
}

#[test]
fn constant_source_is_absorbed_by_lambda() {
    let g = GridSpec::new(1, 32).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let prob = ErgodicProblem::new(ScalarField::constant(g, 3.0), Hamiltonian::power(2.0).unwrap(), 3.0);
    let relaxed = relax_to_steady(&prob, &SolveSettings::default(), &ws).unwrap();
    assert_eq!(relaxed.lambda, 3.0);
    assert!(relaxed.u.max_abs() < 1e-15);
    let sol = solve(&prob, &SolveSettings::default(), &ws).unwrap();
    assert!((sol.lambda - 3.0).abs() < 1e-14);
    assert_eq!(integral_identity_check(&sol, &prob, &ws).unwrap(), 0.0);
}

#[test]
fn relaxation_reaches_tolerance_on_manufactured_2d() {
    let g = GridSpec::new(2, 64).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let h = Hamiltonian::power(3.0).unwrap();
    let f = manufactured_source(&u_star_2d(g), &h, &ws);
    let prob = ErgodicProblem::new(f, h, 4.0);
    let settings = SolveSettings::default();
    let t = std::time::Instant::now();
    let relaxed = relax_to_steady(&prob, &settings, &ws).unwrap();
    eprintln!("relax: {} steps, residual {:e}, {:?}", relaxed.relax_steps, relaxed.residual_inf, t.elapsed());
    assert!(relaxed.residual_inf <= settings.relax_tol);
    assert!(relaxed.relax_steps <= settings.max_relax_steps);
}

#[test]
fn newton_recovers_perturbed_manufactured_1d() {
    let g = GridSpec::new(1, 64).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let h = Hamiltonian::power(2.0).unwrap();
    let u_star = u_star_1d(g);
    let f = manufactured_source(&u_star, &h, &ws);
    let prob = ErgodicProblem::new(f, h, 3.0);
    let noise = ScalarField::from_fn(g, |x| 1e-3 * ((37.0 * x[0]).sin() + (11.0 * x[0] * x[0]).cos()));
    let seed_u = u_star.zip_map(&noise, |a, b| a + b).unwrap().centered();
    let seed = ErgodicSolution {
        u: seed_u,
        lambda: 1e-3,
        residual_inf: f64::INFINITY,
        residual_l2: f64::INFINITY,
        relax_steps: 0,
        newton_steps: 0,
        converged: false,
    };
    let sol = newton_refine(&seed, &prob, &SolveSettings::default(), &ws).unwrap();
    assert!(sol.converged);
    assert!(sol.newton_steps <= 6, "{} steps", sol.newton_steps);
    assert!(sol.u.max_abs_diff(&u_star.centered()).unwrap() < 1e-9);
    assert!(sol.lambda.abs() < 1e-9);
}

#[test]
fn zero_newton_cap_returns_seed_in_error() {
    let g = GridSpec::new(1, 32).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let f = ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).sin());
    let prob = ErgodicProblem::new(f, Hamiltonian::power(2.0).unwrap(), 3.0);
    let seed = ErgodicSolution {
        u: ScalarField::zeros(g),
        lambda: 0.0,
        residual_inf: 1.0,
        residual_l2: 1.0,
        relax_steps: 0,
        newton_steps: 0,
        converged: false,
    };
    let settings = SolveSettings {
        max_newton_steps: 0,
        ..SolveSettings::default()
    };
    match newton_refine(&seed, &prob, &settings, &ws) {
        Err(SolveError::NonConvergence { best, .. }) => {
            assert_eq!(best.u, seed.u);
            assert_eq!(best.newton_steps, 0);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(settings.validate().is_err());
}

#[test]
fn manufactured_recovery_all_cases() {
    for d in [1, 2] {
        for gamma in [2.0, 3.0] {
            let g = GridSpec::new(d, 64).unwrap();
            let ws = SpectrumWorkspace::new(g);
            let h = Hamiltonian::power(gamma).unwrap();
            let u_star = if d == 1 { u_star_1d(g) } else { u_star_2d(g) };
            let f = manufactured_source(&u_star, &h, &ws);
            let prob = ErgodicProblem::new(f, h, 4.0);
            let t = std::time::Instant::now();
            let sol = solve(&prob, &SolveSettings::default(), &ws).unwrap();
            let err = sol.u.max_abs_diff(&u_star.centered()).unwrap();
            eprintln!(
                "d={d} gamma={gamma}: relax {} newton {} err {err:e} lambda {:e} res {:e} {:?}",
                sol.relax_steps,
                sol.newton_steps,
                sol.lambda,
                sol.residual_inf,
                t.elapsed()
            );
            assert!(err < 1e-8);
            assert!(integral_identity_check(&sol, &prob, &ws).unwrap() <= 10.0 * 1e-10);
            if gamma == 2.0 {
                let hc = hopf_cole_residual(&sol, &prob, &ws).unwrap();
                assert!(hc < 1e-7, "hopf-cole {hc:e}");
            }
        }
    }
}

#[test]
fn gauge_shift_moves_only_lambda() {
    let g = GridSpec::new(2, 32).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let f = ScalarField::from_fn(g, |x| 2.0 * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos() + 0.5);
    let settings = SolveSettings {
        relax_dt: Some(1e-3),
        ..SolveSettings::default()
    };
    let h = Hamiltonian::power(3.0).unwrap();
    let base = solve(&ErgodicProblem::new(f.clone(), h.clone(), 4.0), &settings, &ws).unwrap();
    let c = 1.75;
    let shifted = solve(&ErgodicProblem::new(f.shifted(c), h, 4.0), &settings, &ws).unwrap();
    assert!(base.u.max_abs_diff(&shifted.u).unwrap() < 1e-10);
    assert!((shifted.lambda - base.lambda - c).abs() < 1e-10);
}

#[test]
fn jacobian_matches_finite_differences() {
    let g = GridSpec::new(2, 32).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let h = Hamiltonian::power(2.5).unwrap();
    let f = ScalarField::from_fn(g, |x| (2.0 * PI * x[1]).cos());
    let map = ResidualMap::new(&ws, &h, &f).unwrap();
    let u = u_star_2d(g);
    let v = ScalarField::from_fn(g, |x| (2.0 * PI * (x[0] - x[1])).sin() + 0.3 * (6.0 * PI * x[0]).cos());
    let lin = map.linearize(&u).unwrap();
    let jv = lin.apply(&v, 0.0);
    let step = 1e-6;
    let r0 = map.residual(&u, 0.0).unwrap();
    let r1 = map
        .residual(&u.zip_map(&v, |a, b| a + step * b).unwrap(), 0.0)
        .unwrap();
    let fd = r1.zip_map(&r0, |a, b| (a - b) / step).unwrap();
    let rel = fd.max_abs_diff(&jv).unwrap() / jv.max_abs();
    assert!(rel <= 1e-5, "relative error {rel:e}");
}

#[test]
fn hopf_cole_rejects_other_hamiltonians() {
    let g = GridSpec::new(1, 16).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let sol = ErgodicSolution {
        u: ScalarField::zeros(g),
        lambda: 0.0,
        residual_inf: 0.0,
        residual_l2: 0.0,
        relax_steps: 0,
        newton_steps: 0,
        converged: true,
    };
    let prob = ErgodicProblem::new(ScalarField::zeros(g), Hamiltonian::power(3.0).unwrap(), 4.0);
    assert!(matches!(hopf_cole_residual(&sol, &prob, &ws), Err(SolveError::Domain(_))));
    let prob2 = ErgodicProblem::new(ScalarField::zeros(g), Hamiltonian::power(2.0).unwrap(), 4.0);
    assert_eq!(hopf_cole_residual(&sol, &prob2, &ws).unwrap(), 0.0);
    // A corrupted solution is detected.
    let bad = ErgodicSolution {
        u: ScalarField::from_fn(g, |x| 0.01 * (2.0 * PI * x[0]).sin()),
        ..sol
    };
    assert!(hopf_cole_residual(&bad, &prob2, &ws).unwrap() > 1e-3);
}

#[test]
fn perturbed_hamiltonian_solves() {
    let g = GridSpec::new(2, 32).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let h = Hamiltonian::power(2.0)
        .unwrap()
        .with_perturbation(Perturbation::bounded_cosine(0.2), 2)
        .unwrap();
    let f = ScalarField::from_fn(g, |x| 3.0 * (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).sin());
    let prob = ErgodicProblem::new(f, h, 3.0);
    let sol = solve(&prob, &SolveSettings::default(), &ws).unwrap();
    assert!(sol.converged);
    assert!(residual_field(&sol, &prob, &ws).unwrap().max_abs() <= 1e-10);
}
