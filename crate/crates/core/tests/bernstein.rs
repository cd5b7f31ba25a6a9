use std::f64::consts::PI;

use hjlab_core::bernstein::*;
use hjlab_core::solver::{
    solve, ErgodicProblem, ErgodicSolution, Hamiltonian, ResidualMap, SolveSettings,
};
use hjlab_core::spectral::{gradient, hessian, GridSpec, ScalarField, SpectrumWorkspace};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn u_star_2d(g: GridSpec) -> ScalarField {
    ScalarField::from_fn(g, |x| {
        0.1 * (2.0 * PI * x[0]).cos() + 0.05 * (2.0 * PI * (x[0] + 2.0 * x[1])).sin()
            - 0.03 * (4.0 * PI * x[1]).cos()
    })
}

fn random_band_limited(g: GridSpec, seed: u64, band: i64, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for m1 in -band..=band {
        for m2 in -band..=band {
            terms.push((m1 as f64, m2 as f64, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)));
        }
    }
    ScalarField::from_fn(g, |x| {
        terms
            .iter()
            .map(|&(a, b, c, ph)| amplitude * c * (2.0 * PI * (a * x[0] + b * x[1]) + ph).cos())
            .sum()
    })
    .centered()
}

struct Manufactured {
    prob: ErgodicProblem,
    sol: ErgodicSolution,
    ws: SpectrumWorkspace,
}

fn manufactured(n: usize, gamma: f64) -> Manufactured {
    let g = GridSpec::new(2, n).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let h = Hamiltonian::power(gamma).unwrap();
    let f = ResidualMap::new(&ws, &h, &ScalarField::zeros(g))
        .unwrap()
        .residual(&u_star_2d(g), 0.0)
        .unwrap();
    let prob = ErgodicProblem::new(f, h, 4.0);
    let sol = solve(&prob, &SolveSettings::default(), &ws).unwrap();
    Manufactured { prob, sol, ws }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn exponent_identities_are_exact_for_rational_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 40 {
        let gamma = rat(rng.random_range(11..60), 10);
        let q = rat(rng.random_range(21..120), 10);
        let d = rng.random_range(1..=6);
        let Ok(e) = derive_exponents_in(gamma, q, d, None) else { continue };
        let (a, b) = e.eta_split();
        assert_eq!(a, b);
        let (a, b) = e.beta_eta_sum();
        assert_eq!(a, b);
        if let Some((a, b)) = e.sobolev_balance() {
            if e.used_fallback {
                assert!(a > b);
            } else {
                assert_eq!(a, b);
            }
        }
        assert!(e.beta > rat(1, 1));
        assert!(e.holder_product() < rat(1, 1));
        checked += 1;
    }
}

#[test]
fn random_field_audit_has_no_violations() {
    let g = GridSpec::new(2, 32).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let mut exps = derive_exponents(3.0, 4.0, 2, None).unwrap();
    exps.delta = 0.3;
    for seed in 0..3 {
        let u = random_band_limited(g, seed, 4, 0.2);
        let report = pointwise_audit(&u, &exps, &ws).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn cauchy_schwarz_is_sharp_on_the_diagonal() {
    let g = GridSpec::new(2, 32).unwrap();
    let ws = SpectrumWorkspace::new(g);
    let u = ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).sin() + (2.0 * PI * x[1]).sin());
    let exps = derive_exponents(3.0, 4.0, 2, None).unwrap();
    let defects = defect_fields(&u, &exps, &ws).unwrap();
    let hess = hessian(&u, &ws).unwrap();
    let mut equal_nodes = 0;
    for i in 0..g.n() {
        let flat = g.ravel(&[i, i]);
        let d11 = hess.entry(0, 0).values()[flat];
        let d22 = hess.entry(1, 1).values()[flat];
        let d12 = hess.entry(0, 1).values()[flat];
        assert!((d11 - d22).abs() < 1e-9 && d12.abs() < 1e-9);
        let scale = d11 * d11 + d22 * d22;
        assert!(defects[2].values()[flat].abs() <= 1e-12 + 1e-10 * scale);
        equal_nodes += 1;
    }
    assert_eq!(equal_nodes, 32);
    assert!(defects[2].max() <= 1e-12 + 1e-10 * 2.0 * (4.0 * PI * PI).powi(2));
}

#[test]
fn ibp_identity_trivial_cases() {
    let m = manufactured(32, 2.0);
    let exps = derive_exponents(2.0, 4.0, 2, None).unwrap();
    let w = level_field(&m.sol.u, exps.delta, &m.ws).unwrap();
    let above = ibp_identity_residual(&m.sol, &m.prob, &exps, w.max() * 1.01, &m.ws).unwrap();
    assert_eq!((above.lhs, above.rhs, above.relative_gap), (0.0, 0.0, 0.0));
    assert!(ibp_identity_residual(&m.sol, &m.prob, &exps, 0.5, &m.ws).is_err());

    let g = *m.ws.grid();
    let zero_prob = ErgodicProblem::new(ScalarField::zeros(g), Hamiltonian::power(2.0).unwrap(), 4.0);
    let zero_sol = solve(&zero_prob, &SolveSettings::default(), &m.ws).unwrap();
    let r = ibp_identity_residual(&zero_sol, &zero_prob, &exps, 1.0, &m.ws).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
}

#[test]
fn ibp_identity_holds_on_manufactured_solutions() {
    for gamma in [2.0, 3.0] {
        let exps = derive_exponents(gamma, 4.0, 2, None).unwrap();
        let coarse = manufactured(64, gamma);
        let fine = manufactured(128, gamma);
        let w = level_field(&coarse.sol.u, exps.delta, &coarse.ws).unwrap();
        let ks = quantile_levels(&w, &[0.1, 0.3, 0.5, 0.7, 0.9]).unwrap();
        assert!(ks.iter().all(|&k| k > 1.0));
        let mut worst = [0.0f64; 2];
        for &k in &ks {
            let a = ibp_identity_residual(&coarse.sol, &coarse.prob, &exps, k, &coarse.ws).unwrap();
            let b = ibp_identity_residual(&fine.sol, &fine.prob, &exps, k, &fine.ws).unwrap();
            assert!(a.relative_gap <= 1e-5, "γ={gamma} k={k} gap={}", a.relative_gap);
            assert!(a.lhs > 0.0);
            worst[0] = worst[0].max(a.relative_gap);
            worst[1] = worst[1].max(b.relative_gap);
        }
        assert!(worst[1] < worst[0], "γ={gamma}: {worst:?}");
    }
}

#[test]
fn refined_quadrature_beats_nodal_quadrature() {
    let m = manufactured(64, 2.0);
    let exps = derive_exponents(2.0, 4.0, 2, None).unwrap();
    let w = level_field(&m.sol.u, exps.delta, &m.ws).unwrap();
    let k = quantile_levels(&w, &[0.9]).unwrap()[0];
    let gaps: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&r| ibp_identity_residual_with(&m.sol, &m.prob, &exps, k, r, &m.ws).unwrap().relative_gap)
        .collect();
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
    assert_eq!(ibp_identity_residual(&m.sol, &m.prob, &exps, k, &m.ws).unwrap().refinement, 8);
    assert!(ibp_identity_residual_with(&m.sol, &m.prob, &exps, k, 3, &m.ws).is_err());
}

#[test]
fn default_refinement_respects_the_node_budget() {
    let factor = |d, n| default_ibp_refinement(&GridSpec::new(d, n).unwrap());
    assert_eq!(factor(1, 64), 8);
    assert_eq!(factor(2, 64), 8);
    assert_eq!(factor(2, 256), 8);
    assert_eq!(factor(2, 512), 4);
    assert_eq!(factor(3, 32), 4);
    assert_eq!(factor(3, 64), 2);
    assert_eq!(factor(3, 256), 1);
}

#[test]
fn superlevel_curve_matches_brute_force_bitwise() {
    let m = manufactured(32, 3.0);
    let exps = derive_exponents(3.0, 4.0, 2, None).unwrap();
    let grad = gradient(&m.sol.u, &m.ws).unwrap();
    let s_field = grad.norm_squared();
    let ks = default_k_grid(&s_field, exps.delta, 1.0, 1.05, 64).unwrap();
    let curve = superlevel_curve(&m.sol, &exps, &ks, &m.ws).unwrap();

    let g = *m.ws.grid();
    let vol = g.cell_volume();
    for (idx, &k) in ks.iter().enumerate() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for node in 0..g.len() {
            let mut s = 0.0;
            for comp in grad.components() {
                let p = comp.values()[node];
                s += p * p;
            }
            let a = (1.0 + s).powf(0.5 * (1.0 + exps.delta)) - k;
            if a > 0.0 {
                sum += a.powf(exps.q * exps.gamma / (1.0 + exps.delta));
            }
            if 1.0 + s > k.powf(2.0 / (1.0 + exps.delta)) {
                count += 1;
            }
        }
        assert_eq!((sum * vol).to_bits(), curve.y[idx].to_bits());
        assert_eq!(((count as f64) * vol).to_bits(), curve.omega_arg[idx].to_bits());
    }

    assert!(curve.y[0] > 0.0);
    let first_zero = curve.y.iter().position(|&y| y == 0.0).unwrap();
    assert!(curve.y[..first_zero].windows(2).all(|w| w[1] < w[0]));
    assert!(curve.y[first_zero..].iter().all(|&y| y == 0.0));
    assert!(curve.omega_arg.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*curve.omega_arg.last().unwrap(), 0.0);
}

#[test]
fn alternative_closed_forms_in_every_dimension() {
    for d in 3..=10u32 {
        let (z, f) = f_alternative(d).unwrap();
        let r = (d as f64 - 2.0) / d as f64;
        let z_closed = r.powf(d as f64 / 2.0);
        let f_closed = r.powf((d as f64 - 2.0) / 2.0) * (1.0 - r);
        assert!((z - z_closed).abs() < 1e-12);
        assert!((f - f_closed).abs() < 1e-12);
    }
}

#[test]
fn envelope_from_manufactured_curve() {
    let m = manufactured(32, 3.0);
    let exps = derive_exponents(3.0, 4.0, 2, None).unwrap();
    let s_field = gradient(&m.sol.u, &m.ws).unwrap().norm_squared();
    let ks = default_k_grid(&s_field, exps.delta, 1.0, 1.05, 32).unwrap();
    let curve = superlevel_curve(&m.sol, &exps, &ks, &m.ws).unwrap();
    let env = omega_envelope(&[("m", &curve)]).unwrap();
    assert!(env.points.iter().all(|&(t, e)| (0.0..=1.0).contains(&t) && e >= 0.0));
    assert!(env.points.windows(2).all(|w| w[0].1 <= w[1].1));
    assert_eq!(env.value_at(0.0), 0.0);
}

proptest! {
    #[test]
    fn g_properties_hold(s in 0.0f64..1e6, delta in 0.01f64..0.99) {
        let slack = g_property_slack(s, delta).unwrap();
        let scale = (1.0 + s).powf(0.5 * delta);
        prop_assert!(slack[0] >= -(1e-12 + 1e-10 * scale));
        prop_assert!(slack[1] >= 0.0);
    }

    #[test]
    fn derived_exponents_satisfy_invariants(gamma in 1.05f64..6.0, q_extra in 0.01f64..10.0, d in 1u32..=8) {
        let q = (d as f64 * (gamma - 1.0) / gamma).max(2.0) + q_extra;
        let e = derive_exponents(gamma, q, d, None).unwrap();
        prop_assert!(e.delta > 0.0 && e.delta < e.delta_max && e.delta <= 0.1);
        prop_assert!(e.beta > 1.0);
        prop_assert!(e.holder_product() < 1.0);
        prop_assert!(e.p > 2.0 && e.p < q);
        let (a, b) = e.beta_eta_sum();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs());
    }

    #[test]
    fn alternative_roots_solve(d in 3u32..=10, frac in 0.0f64..1.0) {
        let alt = Alternative::for_dimension(d).unwrap();
        let omega = frac * alt.f_star;
        prop_assume!(omega < alt.f_star);
        let (lo, hi) = alt.roots(omega).unwrap();
        prop_assert!(lo <= alt.z_star && alt.z_star <= hi);
        prop_assert!((alt.f(lo) - omega).abs() <= 1e-10);
        prop_assert!((alt.f(hi) - omega).abs() <= 1e-10);
    }

    #[test]
    fn k_star_is_monotone_in_delta(l1 in 0.001f64..10.0, t in 0.001f64..1.0, d1 in 0.01f64..0.5, d2 in 0.5f64..0.99) {
        prop_assert!(k_star(l1, t, d1).unwrap() < k_star(l1, t, d2).unwrap());
    }
}
