use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdse_core::contour::{build_quadrature, Block, ContourConfig, GammaQuadrature};
use tdse_core::xform::{dense_forward_1d, dense_inverse_1d, CMode, Plan1D, Plan2D, SpectralCoeffs1D};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn quad(m: usize, ne: usize, nr: usize, d: usize) -> GammaQuadrature {
    let mut c = ContourConfig::new(1e-10, m, ne);
    c.nr = nr;
    c.d = d;
    build_quadrature(&c).unwrap()
}

fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn l1(f: &[Complex64]) -> f64 {
    f.iter().map(|z| z.norm()).sum()
}

fn cmode() -> impl Strategy<Value = CMode> {
    prop_oneof![Just(CMode::Auto), Just(CMode::Direct), Just(CMode::Chebyshev)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_matches_dense(seed in any::<u64>(), hm in 8usize..40, extra in 0usize..60, nr in 1usize..4, mode in cmode()) {
        let m = 2 * hm;
        let q = quad(m, 3 * hm / 2 + extra, nr, 1);
        let plan = Plan1D::with_mode(&q, mode).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random(&mut rng, m);
        let fast = plan.forward(&f).unwrap();
        let dense = dense_forward_1d(&q, &f).unwrap();
        // both sides carry roundoff of order eps_mach e^H per unit of input
        let tol = (16.0 * f64::EPSILON * q.height.exp()).max(1e-12) * l1(&f);
        for b in Block::ALL {
            for (a, e) in fast.block(b).iter().zip(&dense[q.range(b)]) {
                prop_assert!((a - e).norm() <= tol, "{}: {a} vs {e}", b.name());
            }
        }
    }

    #[test]
    fn inverse_matches_dense(seed in any::<u64>(), hm in 8usize..40, extra in 0usize..60, nr in 1usize..4, mode in cmode()) {
        let m = 2 * hm;
        let q = quad(m, 3 * hm / 2 + extra, nr, 1);
        let plan = Plan1D::with_mode(&q, mode).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for b in Block::ALL {
            let r = q.range(b);
            let mut c = vec![Complex64::new(0.0, 0.0); q.len()];
            c[r.clone()].copy_from_slice(&random(&mut rng, r.len()));
            let dense = dense_inverse_1d(&q, &c).unwrap();
            let fast = plan.inverse(&SpectralCoeffs1D::from_vec(&q, c).unwrap()).unwrap();
            let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, e) in fast.iter().zip(&dense) {
                prop_assert!((a - e).norm() <= 1e-12 * scale, "{}", b.name());
            }
        }
    }

    #[test]
    fn forward_is_linear(seed in any::<u64>(), a in (-2.0f64..2.0, -2.0f64..2.0), b in (-2.0f64..2.0, -2.0f64..2.0), two_d in any::<bool>()) {
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (fa, fb, fc): (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>);
        if two_d {
            let q = quad(16, 12, 1, 2);
            let plan = Plan2D::new(&q, &q).unwrap();
            let f = random(&mut rng, 256);
            let g = random(&mut rng, 256);
            let h: Vec<Complex64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            fa = plan.forward(&f).unwrap().into_vec();
            fb = plan.forward(&g).unwrap().into_vec();
            fc = plan.forward(&h).unwrap().into_vec();
        } else {
            let q = quad(32, 40, 2, 1);
            let plan = Plan1D::new(&q).unwrap();
            let f = random(&mut rng, 32);
            let g = random(&mut rng, 32);
            let h: Vec<Complex64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
            fa = plan.forward(&f).unwrap().data;
            fb = plan.forward(&g).unwrap().data;
            fc = plan.forward(&h).unwrap().data;
        }
        let scale = fa.iter().chain(&fb).map(|z| z.norm()).fold(0.0, f64::max) * (a.norm() + b.norm() + 1.0);
        for k in 0..fc.len() {
            let e = a * fa[k] + b * fb[k];
            prop_assert!((fc[k] - e).norm() <= 1e-13 * scale);
        }
    }

    #[test]
    fn real_input_conjugate_mirror(seed in any::<u64>(), hm in 8usize..32, extra in 1usize..40) {
        let m = 2 * hm;
        let q = quad(m, hm + extra, 2, 1);
        let plan = Plan1D::new(&q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<Complex64> = (0..m).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
        let c = plan.forward(&f).unwrap();
        let grid = q.grid();
        for (z, v) in q.nodes.iter().zip(&c.data) {
            let w = -z.conj();
            let mirrored: Complex64 = grid.iter().zip(&f).map(|(x, y)| y * (-I * w * x).exp()).sum();
            prop_assert!((mirrored - v.conj()).norm() <= 1e-11 * l1(&f) * (1.0 + v.norm()));
        }
    }

    #[test]
    fn reconstruction_within_eps(center in -0.2f64..0.2, width in 0.06f64..0.09, k0 in -10.0f64..10.0) {
        let m = 96;
        let eps = 1e-10;
        let mut cfg = ContourConfig::new(eps, m, 3 * m);
        cfg.nr = 2;
        let q = build_quadrature(&cfg).unwrap();
        let plan = Plan1D::new(&q).unwrap();
        let grid = q.grid();
        let f: Vec<Complex64> = grid
            .iter()
            .map(|x| Complex64::from_polar((-(x - center).powi(2) / (2.0 * width * width)).exp(), k0 * x))
            .collect();
        let mut c = plan.forward(&f).unwrap();
        for (v, w) in c.data.iter_mut().zip(&q.weights) {
            *v *= w * (2.0 / m as f64);
        }
        let back = plan.inverse(&c).unwrap();
        let err = back
            .iter()
            .zip(&f)
            .map(|(a, b)| (a / (2.0 * std::f64::consts::PI) - b).norm())
            .fold(0.0, f64::max);
        prop_assert!(err <= eps, "{err:e}");
    }
}

#[test]
fn forward_cost_is_quasi_linear_in_ne() {
    let m = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random(&mut rng, m);
    let time = |ne: usize| {
        let q = quad(m, ne, 2, 1);
        let plan = Plan1D::new(&q).unwrap();
        let reps = 200;
        let mut best = f64::INFINITY;
        for _ in 0..5 {
            let t = std::time::Instant::now();
            for _ in 0..reps {
                std::hint::black_box(plan.forward(&f).unwrap());
            }
            best = best.min(t.elapsed().as_secs_f64());
        }
        best
    };
    let (a, b) = (time(1024), time(2048));
    assert!(b <= 2.5 * a, "doubling NE: {a:.3e}s -> {b:.3e}s");
}
