use num_complex::Complex64;
use proptest::prelude::*;
use tdse_core::harness::{
    l2_error, observed_orders, ContourKnobs, ErrorReport, ExperimentConfig, InitialState, OutputSpec, ProblemSpec,
    ReferencePolicy, SnapshotFile, SolverKind,
};
use tdse_core::problems::{FieldSpec, PotentialSpec};
use tdse_core::xform::CMode;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1e3f64..1e3, -1e3f64..1e3).prop_map(|(a, b)| Complex64::new(a, b))
}

fn grids() -> impl Strategy<Value = (usize, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
    (1usize..3, 2usize..12).prop_flat_map(|(d, m)| {
        let n = m.pow(d as u32);
        (
            Just(d),
            prop::collection::vec(complex(), n),
            prop::collection::vec(complex(), n),
            prop::collection::vec(complex(), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l2_is_a_metric((d, u, v, w) in grids(), half in 0.5f64..4.0) {
        let e = |a: &[Complex64], b: &[Complex64]| l2_error(a, b, half, d).unwrap();
        prop_assert!(e(&u, &v) >= 0.0);
        prop_assert_eq!(e(&u, &u), 0.0);
        prop_assert!((e(&u, &v) - e(&v, &u)).abs() <= 1e-12 * e(&u, &v));
        prop_assert!(e(&u, &w) <= (e(&u, &v) + e(&v, &w)) * (1.0 + 1e-12));
    }

    #[test]
    fn l2_is_homogeneous((d, u, v, _w) in grids(), c in complex()) {
        let cu: Vec<Complex64> = u.iter().map(|z| c * z).collect();
        let cv: Vec<Complex64> = v.iter().map(|z| c * z).collect();
        let a = l2_error(&cu, &cv, 1.0, d).unwrap();
        let b = c.norm() * l2_error(&u, &v, 1.0, d).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn snapshot_round_trip(d in 1usize..3, m in 1usize..9, t in prop::num::f64::ANY, seed in prop::collection::vec(prop::num::f64::ANY, 2)) {
        let shape = vec![m; d];
        let n = m.pow(d as u32);
        let data: Vec<Complex64> = (0..n).map(|k| Complex64::new(seed[0] * k as f64, seed[1] - k as f64)).collect();
        let s = SnapshotFile { t, shape, data };
        let bytes = s.to_bytes().unwrap();
        prop_assert_eq!(bytes.len(), 28 + 4 * d + 16 * n);
        let back = SnapshotFile::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.t.to_bits(), s.t.to_bits());
        prop_assert_eq!(&back.shape, &s.shape);
        for (a, b) in back.data.iter().zip(&s.data) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        prop_assert!(SnapshotFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn emax_is_row_max(rows in prop::collection::vec((0.0f64..10.0, 0.0f64..1.0), 1..50)) {
        let r = ErrorReport::new(rows.clone(), serde_json::json!({}), 0.0, 0.0);
        prop_assert!(rows.iter().all(|x| x.1 <= r.emax));
        prop_assert!(rows.iter().any(|x| x.1 == r.emax));
        let csv = r.to_csv(false);
        prop_assert_eq!(csv.lines().count(), 3 + rows.len());
    }

    #[test]
    fn orders_of_power_laws(p in 0.5f64..14.0, c in 1e-6f64..1e3, r0 in 10.0f64..1000.0, k in 2usize..6) {
        let r: Vec<f64> = (0..k).map(|i| r0 * 2f64.powi(i as i32)).collect();
        let e: Vec<f64> = r.iter().map(|x| c * x.powf(-p)).collect();
        let o = observed_orders(&r, &e);
        prop_assert!(o[0].is_none());
        for v in &o[1..] {
            prop_assert!((v.unwrap() - p).abs() < 1e-9);
        }
    }

    #[test]
    fn config_json_round_trip(
        eps in 1e-14f64..1e-4,
        m in 8usize..512,
        steps in 1usize..10000,
        order in prop_oneof![Just(2usize), Just(4), Just(6), Just(8)],
        h in 0.05f64..2.0,
        v0 in 0.0f64..2000.0,
        a0 in 0.0f64..4000.0,
    ) {
        let cfg = ExperimentConfig {
            name: "p".into(),
            problem: ProblemSpec {
                potential: PotentialSpec::GaussianWell { v0, beta: 0.1 },
                field: FieldSpec::pulse(a0, 100.0, 1.0),
                initial: InitialState::GroundState { n: 128 },
                t_final: 0.5,
            },
            solver: SolverKind::Free,
            d: 1,
            m: vec![m],
            steps,
            dt: None,
            order,
            contour: Some(ContourKnobs { eps, p: 8, q: 10, nr: 2, ne: None, h: Some(vec![h]), cmode: CMode::Chebyshev }),
            output: OutputSpec::default(),
            reference: ReferencePolicy::SelfConverged { steps: 2 * steps },
        };
        let s = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
