use proptest::prelude::*;
use tdse_core::contour::quiver_radius;
use tdse_core::problems::{wavepacket, FieldSpec, Potential, PotentialSpec, WavepacketParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pulse_vanishes_at_both_ends(a0 in 0.1f64..4000.0, omega in 0.5f64..600.0, t in 0.05f64..1000.0) {
        let f = FieldSpec::pulse(a0, omega, t);
        prop_assert_eq!(f.a(0.0), 0.0);
        prop_assert_eq!(f.a(t), 0.0);
        prop_assert_eq!(f.phi(0.0).unwrap(), 0.0);
    }

    #[test]
    fn phi_bounded_by_quiver_radius(a0 in 0.1f64..4000.0, omega in 5.0f64..600.0, t in 0.05f64..2.0) {
        let f = FieldSpec::pulse(a0, omega, t);
        let r = quiver_radius(&f, t).unwrap();
        for k in 0..=400 {
            let s = t * k as f64 / 400.0;
            prop_assert!(f.phi(s).unwrap().abs() <= r * (1.0 + 1e-12));
        }
    }

    #[test]
    fn phi_is_continuous(a0 in 0.1f64..1000.0, omega in 5.0f64..300.0, t in 0.1f64..2.0, s in 0.0f64..1.0) {
        let f = FieldSpec::pulse(a0, omega, t);
        let s = s * t * 0.999;
        let h = 1e-7 * t;
        let jump = (f.phi(s + h).unwrap() - f.phi(s).unwrap()).abs();
        prop_assert!(jump <= a0 * h * (1.0 + 1e-6));
    }

    #[test]
    fn packet_center_modulus(sigma in 0.02f64..0.3, t in 0.0f64..2.0) {
        // u(0, t) = σ^{3/2} π^{-1/4} (σ² + 2it)^{-1/2} when k0 = 0
        let p = WavepacketParams { sigma, k0: 0.0 };
        let u0 = wavepacket(&p, 0.0, 0.0).norm();
        let ut = wavepacket(&p, 0.0, t).norm();
        let expect = u0 * sigma / (sigma.powi(4) + 4.0 * t * t).powf(0.25);
        prop_assert!((ut - expect).abs() <= 1e-13 * expect);
    }

    #[test]
    fn packet_modulus_is_translation_of_free_packet(sigma in 0.05f64..0.2, k0 in -20.0f64..20.0, t in 0.0f64..0.5, x in -1.0f64..1.0) {
        // |u| for carrier k0 is the k0 = 0 modulus moved by the group velocity 2 k0 / (√2 σ)
        let v = 2.0 * k0 / (std::f64::consts::SQRT_2 * sigma);
        let a = wavepacket(&WavepacketParams { sigma, k0 }, x, t).norm();
        let b = wavepacket(&WavepacketParams { sigma, k0: 0.0 }, x - v * t, t).norm();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
    }

    #[test]
    fn well_negligible_outside_box(x in 1.0f64..5.0, y in -5.0f64..5.0, sign in prop::bool::ANY) {
        let v = PotentialSpec::GaussianWell { v0: 1400.0, beta: 0.1 };
        let x = if sign { x } else { -x };
        prop_assert!(v.value(&[x], 0.0).abs() < 1e-18);
        prop_assert!(v.value(&[x, y], 0.0).abs() < 1e-18);
    }

    #[test]
    fn periodic_train_is_periodic(x in -3.0f64..3.0, t in 0.0f64..1.0, c in 0.0f64..45.0, k in -3i32..=3) {
        let v = PotentialSpec::MovingPeriodicWell { v0: 300.0, beta: 0.2, c };
        let a = v.value(&[x], t);
        let b = v.value(&[x + 2.0 * std::f64::consts::PI * k as f64], t);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
