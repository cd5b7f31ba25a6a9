use std::f64::consts::PI;
use std::time::Instant;

use hjlab_core::counterexample::*;

const EPS_LIST: [f64; 6] = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0];

fn quad() -> QuadratureSettings {
    QuadratureSettings::new(1e-9, 30)
}

#[test]
fn constants() {
    assert!((c_constant(3.0, 3).unwrap() + 1.5f64.sqrt()).abs() < 1e-15);
    assert!((c_constant(3.0, 3).unwrap() + 1.224_744_9).abs() < 1e-7);
    assert_eq!(c_constant(2.0, 3).unwrap(), -1.0);
    let err = c_constant(4.0 / 3.0, 3).unwrap_err();
    assert!(err.to_string().contains("meaningful only if γ > d/(d−1)"));
    assert!(c_constant(2.0, 2).is_err());
    assert_eq!(critical_q(3.0, 3), 2.0);
    assert_eq!(critical_q(2.0, 4), 2.0);
    assert_eq!(critical_q(2.0, 3), 1.5);
    // The defining relation itself.
    for (g, d) in [(3.0, 3), (2.0, 3), (2.0, 4), (3.0, 2), (2.5, 4)] {
        let c = c_constant(g, d).unwrap();
        let rhs = -(d as f64 - 1.0 - 1.0 / (g - 1.0)) * c;
        assert!((c.abs().powf(g) - rhs).abs() < 1e-14 * rhs);
    }
}

#[test]
fn profile_support_structure() {
    let eps = 1.0 / 32.0;
    let prof = RadialProfile::new(3.0, 3, eps, CutoffProfile::Smooth).unwrap();
    let at_edge = profile_eval(&prof, 0.5).unwrap();
    assert_eq!(at_edge.v, 0.0);
    for r in [0.1 * eps, 0.5 * eps, eps] {
        let vals = profile_eval(&prof, r).unwrap();
        assert_eq!((vals.dv, vals.f), (0.0, 0.0));
    }
    for r in [2.0 * eps, 3.0 * eps, 0.3] {
        assert_eq!(profile_eval(&prof, r).unwrap().f, 0.0);
    }
    assert!(profile_eval(&prof, 0.0).is_err());
    assert!(RadialProfile::new(3.0, 3, 0.3, CutoffProfile::Smooth).is_err());
    assert!(RadialProfile::new(3.0, 5, 0.1, CutoffProfile::Smooth).is_err());
}

#[test]
fn profile_matches_closed_form_outside_transition() {
    // For r ≥ 2ε, χ = 1 and v(r) = c ∫_r^{1/2} s^{−a} ds.
    for (gamma, d) in [(3.0, 3), (2.0, 3), (2.0, 4), (3.0, 2)] {
        let eps = 1.0 / 64.0;
        let prof = RadialProfile::new(gamma, d, eps, CutoffProfile::Smooth).unwrap();
        let a = 1.0 / (gamma - 1.0);
        for r in [2.0 * eps, 0.1, 0.4] {
            let exact = if a == 1.0 {
                prof.c * (0.5 / r).ln()
            } else {
                prof.c * (0.5f64.powf(1.0 - a) - r.powf(1.0 - a)) / (1.0 - a)
            };
            let v = profile_eval(&prof, r).unwrap().v;
            assert!((v - exact).abs() <= 1e-11 * exact.abs(), "γ={gamma} d={d} r={r}");
        }
    }
}

#[test]
fn profile_is_nonpositive_and_nondecreasing() {
    let prof = RadialProfile::new(3.0, 3, 1.0 / 16.0, CutoffProfile::Smooth).unwrap();
    let radii = log_radii(1e-3, 0.5, 200);
    let mut prev = f64::NEG_INFINITY;
    for r in radii {
        let vals = profile_eval(&prof, r).unwrap();
        assert!(vals.v <= 0.0);
        assert!(vals.dv >= 0.0);
        assert!(vals.v >= prev - 1e-14);
        prev = vals.v;
    }
}

#[test]
fn radial_pde_residual_is_round_off() {
    let eps = 1.0 / 32.0;
    let prof = RadialProfile::new(3.0, 3, eps, CutoffProfile::Smooth).unwrap();
    let (res, _) = prof.residual_at(3.0 * eps);
    assert!(res.abs() < 1e-12 * (3.0 * eps).powf(-1.5));
    assert_eq!(prof.residual_at(0.5 * eps).0, 0.0);

    for (gamma, d) in [(3.0, 3), (2.0, 3), (2.0, 4), (3.0, 2)] {
        for eps in EPS_LIST {
            let prof = RadialProfile::new(gamma, d, eps, CutoffProfile::Smooth).unwrap();
            let r = radial_residual(&prof, &log_radii(1e-4, 0.499, 1000));
            assert!(r.max_relative <= 1e-10, "γ={gamma} d={d} ε={eps}: {r:?}");
        }
    }
}

#[test]
fn critical_norms_and_logarithmic_growth() {
    let start = Instant::now();
    let table = NormTable::compute(3.0, 3, 2.0, &EPS_LIST, CutoffProfile::Smooth, quad()).unwrap();
    let f0 = table.rows[0].norm_f;
    assert!(f0 > 0.0);
    for row in &table.rows {
        assert!((row.norm_f - f0).abs() <= 1e-8 * f0, "{row:?}");
    }
    assert!(table.rows.windows(2).all(|w| w[1].norm_grad_pow > w[0].norm_grad_pow));
    let fit = divergence_fit(&table.rows).unwrap();
    let expected = 1.5f64.powi(3) * 4.0 * PI;
    assert!((expected - 42.4115).abs() < 1e-4);
    assert!((fit.slope - expected).abs() <= 0.02 * expected, "{fit:?}");
    assert!(fit.fit_residual <= 0.02);
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn sharp_cutoff_has_closed_form_gradient_norm() {
    for eps in [1.0 / 16.0, 1.0 / 200.0] {
        let prof = RadialProfile::new(3.0, 3, eps, CutoffProfile::Sharp).unwrap();
        let (_, g) = ball_norms(&prof, 2.0, quad()).unwrap();
        let exact = 1.5f64.powi(3) * 4.0 * PI * (1.0 / (2.0 * eps)).ln();
        assert!((g * g - exact).abs() <= 1e-9 * exact);
    }
}

#[test]
fn doubling_refinement_depth_is_stable() {
    for eps in [1.0 / 16.0, 1.0 / 512.0] {
        let prof = RadialProfile::new(3.0, 3, eps, CutoffProfile::Smooth).unwrap();
        let a = ball_norms(&prof, 2.0, QuadratureSettings::new(1e-9, 20)).unwrap();
        let b = ball_norms(&prof, 2.0, QuadratureSettings::new(1e-9, 40)).unwrap();
        assert!((a.0 - b.0).abs() <= 1e-9 * b.0);
        assert!((a.1 - b.1).abs() <= 1e-9 * b.1);
    }
}

#[test]
fn supercritical_q_breaks_the_logarithmic_law() {
    let table = NormTable::compute(3.0, 3, 2.5, &EPS_LIST, CutoffProfile::Smooth, quad()).unwrap();
    let fit = divergence_fit(&table.rows).unwrap();
    assert!(fit.fit_residual > 0.05, "{fit:?}");
}

#[test]
fn fit_on_synthetic_rows() {
    let rows: Vec<NormRow> = [0.1, 0.05, 0.02, 0.01]
        .iter()
        .map(|&eps: &f64| NormRow {
            eps,
            q: 1.0,
            norm_f: 1.0,
            norm_grad_pow: 2.0 * (1.0 / eps).ln() + 1.0,
        })
        .collect();
    let fit = divergence_fit(&rows).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-12);
    assert!((fit.intercept - 1.0).abs() < 1e-12);
    assert!(fit.fit_residual < 1e-14);
    assert!(divergence_fit(&rows[..3]).is_err());
}

#[test]
fn csv_carries_fit_comments() {
    let table = NormTable::compute(3.0, 3, 2.0, &EPS_LIST[..4], CutoffProfile::Smooth, quad()).unwrap();
    let fit = divergence_fit(&table.rows).unwrap();
    let mut buf = Vec::new();
    table.write_csv(&mut buf, Some(&fit), &[("radial_residual_max", 1e-13)]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains("# slope="));
    assert!(text.contains("# intercept="));
    assert!(text.contains("# fit_residual="));
    assert!(text.contains("# radial_residual_max="));
    let data: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "eps,q,norm_f,norm_grad_pow,quad_tol");
    assert_eq!(data.len(), 5);
}
