use super::*;
use crate::problems::{FieldSpec, PotentialSpec};
use crate::xform::CMode;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn packet_config(steps: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: "packet".into(),
        problem: ProblemSpec {
            potential: PotentialSpec::Zero,
            field: FieldSpec::Zero,
            initial: InitialState::Wavepacket { sigma: 0.1, k0: 0.0 },
            t_final: 0.02,
        },
        solver: SolverKind::Free,
        d: 1,
        m: vec![48],
        steps,
        dt: None,
        order: 4,
        contour: Some(ContourKnobs { eps: 1e-14, p: 8, q: 10, nr: 1, ne: Some(vec![240]), h: None, cmode: CMode::Auto }),
        output: OutputSpec::default(),
        reference: ReferencePolicy::Analytic,
    }
}

#[test]
fn l2_error_of_identical_grids_is_zero() {
    let u: Vec<Complex64> = (0..16).map(|j| Complex64::new(j as f64, -1.0)).collect();
    assert_eq!(l2_error(&u, &u, 1.0, 1).unwrap(), 0.0);
}

#[test]
fn l2_error_of_constant_offset() {
    let m = 40;
    let c = Complex64::new(0.3, -0.4);
    let u = vec![c; m];
    let z = vec![Complex64::new(0.0, 0.0); m];
    let e = l2_error(&u, &z, 1.0, 1).unwrap();
    assert!((e - c.norm() * 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn l2_error_matches_parseval_for_trig_polynomials() {
    // left-endpoint sums of |Σ a_k e^{ikx}|² over [-π, π) are exact below the Nyquist band
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in [1usize, 2] {
        let m = 24;
        let ks: Vec<(i32, i32)> = (0..5).map(|_| (rng.random_range(-8..=8), rng.random_range(-8..=8))).collect();
        let mut coef = std::collections::HashMap::new();
        for k in &ks {
            let a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            *coef.entry(if d == 1 { (k.0, 0) } else { *k }).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        let x = crate::periodic::periodic_grid(m);
        let n = m.pow(d as u32);
        let mut diff = vec![Complex64::new(0.0, 0.0); n];
        for (i, v) in diff.iter_mut().enumerate() {
            let (x1, x2) = if d == 1 { (x[i], 0.0) } else { (x[i / m], x[i % m]) };
            for (&(k1, k2), a) in &coef {
                *v += a * Complex64::from_polar(1.0, k1 as f64 * x1 + k2 as f64 * x2);
            }
        }
        let mut rng2 = ChaCha8Rng::seed_from_u64(11);
        let base: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng2.random(), rng2.random())).collect();
        let shifted: Vec<Complex64> = base.iter().zip(&diff).map(|(b, e)| b + e).collect();
        let exact = ((2.0 * std::f64::consts::PI).powi(d as i32) * coef.values().map(|a| a.norm_sqr()).sum::<f64>()).sqrt();
        let e = l2_error(&shifted, &base, PERIODIC_HALF_WIDTH, d).unwrap();
        assert!((e - exact).abs() < 1e-12 * exact, "d={d}: {e} vs {exact}");
    }
}

#[test]
fn l2_error_rejects_mismatched_grids() {
    let a = vec![Complex64::new(0.0, 0.0); 10];
    let b = vec![Complex64::new(0.0, 0.0); 12];
    assert!(matches!(l2_error(&a, &b, 1.0, 1), Err(crate::Error::Shape { .. })));
    assert!(l2_error(&a, &a, 1.0, 2).is_err());
}

#[test]
fn orders_of_exact_power_law() {
    let r = [100.0, 200.0, 400.0, 800.0];
    let e: Vec<f64> = r.iter().map(|x: &f64| 3.0 * x.powf(-8.0)).collect();
    let o = observed_orders(&r, &e);
    assert!(o[0].is_none());
    for v in &o[1..] {
        assert!((v.unwrap() - 8.0).abs() < 1e-10);
    }
}

#[test]
fn error_report_emax_is_row_max() {
    let r = ErrorReport::new(vec![(0.0, 1e-3), (0.1, 4e-3), (0.2, 2e-3)], serde_json::json!({}), 0.0, 0.0);
    assert_eq!(r.emax, 4e-3);
    assert!(r.to_csv(false).contains("t,E\n"));
}

#[test]
fn snapshot_round_trip_and_layout() {
    let snap = SnapshotFile {
        t: 0.25,
        shape: vec![3, 2],
        data: (0..6).map(|j| Complex64::new(j as f64, -(j as f64) / 3.0)).collect(),
    };
    let bytes = snap.to_bytes().unwrap();
    assert_eq!(&bytes[..8], b"TDSESNAP");
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), SNAPSHOT_VERSION);
    assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(bytes[20..24].try_into().unwrap()), 3);
    assert_eq!(f64::from_le_bytes(bytes[28..36].try_into().unwrap()), 0.25);
    assert_eq!(f64::from_le_bytes(bytes[36 + 16 + 8..36 + 32].try_into().unwrap()), -1.0 / 3.0);
    assert_eq!(bytes.len(), 36 + 6 * 16);
    assert_eq!(SnapshotFile::from_bytes(&bytes).unwrap(), snap);

    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(SnapshotFile::from_bytes(&bad), Err(crate::Error::Io(_))));
    assert!(SnapshotFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
}

#[test]
fn config_json_round_trip() {
    let mut c = packet_config(10);
    c.problem.field = FieldSpec::pulse(100.0, 100.0, 0.5);
    let s = serde_json::to_string(&c).unwrap();
    let back: ExperimentConfig = serde_json::from_str(&s).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), s);
}

#[test]
fn config_defaults_from_minimal_json() {
    let c: ExperimentConfig = serde_json::from_str(
        r#"{"problem": {"initial": {"kind": "wavepacket", "sigma": 0.1, "k0": 0.0}, "t_final": 0.1},
            "solver": "free", "d": 1, "m": [32], "dt": 0.01,
            "contour": {"eps": 1e-12, "h": [0.5]}, "reference": {"kind": "analytic"}}"#,
    )
    .unwrap();
    assert_eq!(c.order, 8);
    assert_eq!(c.step_count().unwrap(), 10);
    let k = c.contour.as_ref().unwrap();
    assert_eq!((k.p, k.q, k.nr, k.cmode), (8, 10, 1, CMode::Auto));
    c.validate().unwrap();
}

#[test]
fn config_validation() {
    let mut c = packet_config(10);
    c.contour = None;
    assert!(c.validate().is_err());

    let mut c = packet_config(10);
    c.solver = SolverKind::Periodic;
    assert!(c.validate().is_err(), "analytic reference is free-space only");
    c.reference = ReferencePolicy::None;
    c.validate().unwrap();

    let mut c = packet_config(10);
    c.problem.potential = PotentialSpec::GaussianWell { v0: 10.0, beta: 0.1 };
    assert!(c.validate().is_err());

    let mut c = packet_config(10);
    c.dt = Some(0.003);
    assert!(c.validate().is_err());

    let mut c = packet_config(10);
    c.order = 5;
    assert!(c.validate().is_err());

    let mut c = packet_config(10);
    c.problem.field = FieldSpec::pulse(1.0, 1.0, 0.01);
    assert!(c.validate().is_err());
}

#[test]
fn metadata_embeds_config_and_contours() {
    let c = packet_config(10);
    let m = c.metadata().unwrap();
    assert_eq!(m["config"]["contour"]["ne"][0], 240);
    assert_eq!(m["derived"]["steps"], 10);
    assert!(m["derived"]["contours"][0]["H"].as_f64().unwrap() > 0.0);
    let back: ExperimentConfig = serde_json::from_value(m["config"].clone()).unwrap();
    assert_eq!(back.m, c.m);
}

#[test]
fn free_particle_sweep_is_flat() {
    let c = packet_config(5);
    let t = convergence_sweep(&c, &SweepParam::Steps { values: vec![5, 10, 20] }, true).unwrap();
    assert_eq!(t.rows.len(), 3);
    for r in &t.rows {
        assert!(r.error < 1e-12, "{}", r.error);
    }
}

#[test]
fn single_point_sweep_has_no_order() {
    let t = convergence_sweep(&packet_config(5), &SweepParam::Steps { values: vec![5] }, true).unwrap();
    assert_eq!(t.rows.len(), 1);
    assert!(t.rows[0].observed_order.is_none());
    let csv = t.to_csv(false);
    let last = csv.lines().last().unwrap();
    assert_eq!(last.split(',').nth(2), Some(""));
}

#[test]
fn serial_sweeps_are_bitwise_identical() {
    let mut c = packet_config(4);
    c.problem.potential = PotentialSpec::GaussianWell { v0: 1400.0, beta: 0.1 };
    c.problem.initial = InitialState::GroundState { n: 256 };
    c.contour.as_mut().unwrap().eps = 1e-10;
    c.reference = ReferencePolicy::SelfConverged { steps: 32 };
    let sweep = SweepParam::Steps { values: vec![4, 8] };
    let a = convergence_sweep(&c, &sweep, true).unwrap().to_csv(false);
    let b = convergence_sweep(&c, &sweep, true).unwrap().to_csv(false);
    let p = convergence_sweep(&c, &sweep, false).unwrap().to_csv(false);
    assert_eq!(a, b);
    assert_eq!(a, p);
}

#[test]
fn sweep_needs_reference() {
    let mut c = packet_config(4);
    c.reference = ReferencePolicy::None;
    assert!(convergence_sweep(&c, &SweepParam::Steps { values: vec![4] }, true).is_err());
}

#[test]
fn h_sweep_reports_realized_spacing() {
    let c = packet_config(2);
    let t = convergence_sweep(&c, &SweepParam::H { axis: 0, values: vec![0.8, 0.4] }, true).unwrap();
    assert!((t.rows[0].param - 0.8).abs() < 0.05);
    assert!((t.rows[1].param - 0.4).abs() < 0.02);
    assert!(t.rows[1].error < t.rows[0].error);
}

#[test]
fn presets_resolve_within_desk_caps() {
    for name in example_names() {
        let ex = preset(name, false).unwrap();
        assert!(!ex.cases.is_empty());
        for c in &ex.cases {
            c.config.validate().unwrap();
        }
    }
    assert!(matches!(preset("example9", false), Err(crate::Error::Config(_))));
}

#[test]
fn desk_caps() {
    let mut c = packet_config(9000);
    assert!(check_desk_caps(&c, None).is_err());
    c.steps = 100;
    check_desk_caps(&c, None).unwrap();
    assert!(check_desk_caps(&c, Some(&SweepParam::M { values: vec![1024] })).is_err());
}

#[test]
fn run_with_file_reference() {
    let dir = std::env::temp_dir().join(format!("tdse-harness-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ref.snap");
    let mut c = packet_config(4);
    c.reference = ReferencePolicy::None;
    let r = run_experiment(&c).unwrap();
    write_snapshot(&path, &SnapshotFile { t: r.t, shape: c.m.clone(), data: r.u.clone() }).unwrap();
    c.reference = ReferencePolicy::File { path: path.clone() };
    let again = run_experiment(&c).unwrap();
    assert_eq!(again.errors.unwrap().emax, 0.0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn transform_check_small_case_passes() {
    let c = TransformCheck { m: 24, ne: 20, seeds: 2, ..TransformCheck::default() };
    let rows = transform_check(&c).unwrap();
    assert!(rows.iter().any(|r| r.transform == "2d inverse"));
    for r in &rows {
        assert!(r.passed(), "{r:?}");
    }
}
