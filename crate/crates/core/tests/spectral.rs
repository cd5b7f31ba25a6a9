use hjlab_core::spectral::{
    hessian, laplacian, lq_norm, superlevel_measure, GridSpec, ScalarField, SpectrumWorkspace,
};
use proptest::prelude::*;

fn field(d: usize, n: usize, values: Vec<f64>) -> ScalarField {
    ScalarField::new(GridSpec::new(d, n).unwrap(), values).unwrap()
}

fn values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_holds(v in values(16 * 16)) {
        let u = field(2, 16, v);
        let ws = SpectrumWorkspace::new(*u.grid());
        let spec = ws.analyze(u.values());
        let energy: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        let l2 = lq_norm(&u, 2.0).unwrap();
        prop_assert!((energy - l2 * l2).abs() <= 1e-12 * (1.0 + energy));
    }

    #[test]
    fn round_trip_is_identity(v in values(8 * 8 * 8)) {
        let u = field(3, 8, v);
        let ws = SpectrumWorkspace::new(*u.grid());
        let back = ws.synthesize(&ws.analyze(u.values()));
        for (a, b) in back.iter().zip(u.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * 10.0);
        }
    }

    #[test]
    fn superlevel_measure_is_monotone(v in values(32 * 32), k1 in -10.0f64..10.0, dk in 0.0f64..5.0) {
        let u = field(2, 32, v);
        let a = superlevel_measure(&u, k1);
        let b = superlevel_measure(&u, k1 + dk);
        prop_assert!(b <= a);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn hessian_trace_is_laplacian(v in values(16 * 16)) {
        let u = field(2, 16, v);
        let ws = SpectrumWorkspace::new(*u.grid());
        let lap = laplacian(&u, &ws).unwrap();
        let tr = hessian(&u, &ws).unwrap().trace();
        let scale = lap.max_abs().max(1.0);
        prop_assert!(tr.max_abs_diff(&lap).unwrap() <= 1e-12 * scale);
    }

    #[test]
    fn norms_are_ordered(v in values(64)) {
        // On the unit torus ‖u‖_1 ≤ ‖u‖_2 ≤ ‖u‖_4 ≤ ‖u‖_∞.
        let u = field(1, 64, v);
        let n1 = lq_norm(&u, 1.0).unwrap();
        let n2 = lq_norm(&u, 2.0).unwrap();
        let n4 = lq_norm(&u, 4.0).unwrap();
        prop_assert!(n1 <= n2 * (1.0 + 1e-12));
        prop_assert!(n2 <= n4 * (1.0 + 1e-12));
        prop_assert!(n4 <= u.max_abs() * (1.0 + 1e-12));
    }
}
