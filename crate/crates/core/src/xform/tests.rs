use super::*;
use crate::contour::{build_quadrature, ContourConfig};
use crate::I;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quad(m: usize, ne: usize, nr: usize) -> GammaQuadrature {
    let mut cfg = ContourConfig::new(1e-10, m, ne);
    cfg.nr = nr;
    build_quadrature(&cfg).unwrap()
}

fn random(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn l1(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn zero_in_zero_out() {
    let q = quad(32, 24, 2);
    let p = Plan1D::new(&q).unwrap();
    let c = p.forward(&vec![Complex64::new(0.0, 0.0); 32]).unwrap();
    assert!(c.data.iter().all(|z| z.norm() == 0.0));
    assert!(p.inverse(&c).unwrap().iter().all(|z| z.norm() == 0.0));
}

#[test]
fn block_lengths() {
    let q = quad(64, 48, 2);
    let c = Plan1D::new(&q).unwrap().forward(&vec![Complex64::new(1.0, 0.0); 64]).unwrap();
    let lens: Vec<usize> = Block::ALL.iter().map(|b| c.block(*b).len()).collect();
    assert_eq!(lens, vec![48, 8, 40, 8, 48]);
}

#[test]
fn constant_input_is_geometric_sum() {
    let m = 64;
    let q = quad(m, 48, 2);
    let c = Plan1D::new(&q).unwrap().forward(&vec![Complex64::new(1.0, 0.0); m]).unwrap();
    for (z, v) in q.nodes.iter().zip(&c.data) {
        let r = (-2.0 * I * z / m as f64).exp();
        let exact = (I * z).exp() * (1.0 - r.powu(m as u32)) / (1.0 - r);
        assert!((exact - v).norm() < 1e-12 * m as f64 * (1.0 + exact.norm()), "{z}");
    }
}

#[test]
fn matches_dense_both_c_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = quad(64, 48, 4);
    for mode in [CMode::Direct, CMode::Chebyshev] {
        let p = Plan1D::with_mode(&q, mode).unwrap();
        assert_eq!(p.uses_chebyshev(), mode == CMode::Chebyshev);
        let tol = if mode == CMode::Direct { 1e-12 } else { 1e-9 };
        for _ in 0..4 {
            let f = random(64, &mut rng);
            let fast = p.forward(&f).unwrap();
            let err = max_err(&fast.data, &dense_forward_1d(&q, &f).unwrap());
            assert!(err < tol * l1(&f), "{mode:?} forward {err}");
            let c = random(q.len(), &mut rng);
            let fast = p.inverse(&SpectralCoeffs1D::from_vec(&q, c.clone()).unwrap()).unwrap();
            let err = max_err(&fast, &dense_inverse_1d(&q, &c).unwrap());
            assert!(err < tol * l1(&c), "{mode:?} inverse {err}");
        }
    }
}

#[test]
fn one_hot_a_node() {
    let q = quad(32, 24, 1);
    let p = Plan1D::new(&q).unwrap();
    let k = q.range(Block::A1).start + 3;
    let mut c = SpectralCoeffs1D::zeros(&q);
    c.data[k] = Complex64::new(1.0, 0.0);
    let f = p.inverse(&c).unwrap();
    for (x, v) in q.grid().iter().zip(&f) {
        assert!((v - (I * q.nodes[k] * x).exp()).norm() < 1e-13);
    }
}

#[test]
fn linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = quad(32, 20, 2);
    let p = Plan1D::new(&q).unwrap();
    let (f, g) = (random(32, &mut rng), random(32, &mut rng));
    let (a, b) = (Complex64::new(0.3, -2.0), Complex64::new(-1.1, 0.4));
    let h: Vec<Complex64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
    let (ff, fg, fh) = (p.forward(&f).unwrap(), p.forward(&g).unwrap(), p.forward(&h).unwrap());
    let comb: Vec<Complex64> = ff.data.iter().zip(&fg.data).map(|(x, y)| a * x + b * y).collect();
    assert!(max_err(&comb, &fh.data) < 1e-11 * (l1(&f) + l1(&g)));
}

#[test]
fn real_input_conjugate_mirror() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let q = quad(32, 24, 2);
    let p = Plan1D::new(&q).unwrap();
    let f: Vec<Complex64> = (0..32).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
    let c = p.forward(&f).unwrap();
    let grid = q.grid();
    for (z, v) in q.nodes.iter().zip(&c.data) {
        let w = -z.conj();
        let at_mirror: Complex64 = grid.iter().zip(&f).map(|(x, y)| y * (-I * w * x).exp()).sum();
        assert!((at_mirror - v.conj()).norm() < 1e-11 * l1(&f).max(1.0) * (1.0 + v.norm()));
    }
}

#[test]
fn reconstruction_of_compact_bump() {
    let m = 64;
    let mut cfg = ContourConfig::new(1e-10, m, 2 * m);
    cfg.nr = 2;
    let q = build_quadrature(&cfg).unwrap();
    let p = Plan1D::new(&q).unwrap();
    let grid = q.grid();
    let f: Vec<Complex64> = grid.iter().map(|x| Complex64::new((-x * x / 0.02).exp(), 0.0)).collect();
    let mut c = p.forward(&f).unwrap();
    for (v, w) in c.data.iter_mut().zip(&q.weights) {
        *v *= w * (2.0 / m as f64);
    }
    let back = p.inverse(&c).unwrap();
    let err = back.iter().zip(&f).map(|(a, b)| (a / (2.0 * std::f64::consts::PI) - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-9, "{err}");
}

#[test]
fn shape_errors() {
    let q = quad(32, 20, 1);
    let p = Plan1D::new(&q).unwrap();
    assert!(p.forward(&vec![Complex64::new(0.0, 0.0); 31]).is_err());
    assert!(SpectralCoeffs1D::from_vec(&q, vec![]).is_err());
    let p2 = Plan2D::new(&q, &q).unwrap();
    let mut out = vec![Complex64::new(0.0, 0.0); 5];
    assert!(p2.forward_into(&vec![Complex64::new(0.0, 0.0); 32 * 32], &mut out).is_err());
}

#[test]
fn two_d_separable_and_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let q1 = quad(16, 12, 1);
    let q2 = quad(12, 10, 2);
    let p = Plan2D::new(&q1, &q2).unwrap();
    let g = random(16, &mut rng);
    let h = random(12, &mut rng);
    let f: Vec<Complex64> = g.iter().flat_map(|a| h.iter().map(move |b| a * b)).collect();
    let c = p.forward(&f).unwrap();
    let (gh, hh) = (p.p1.forward(&g).unwrap(), p.p2.forward(&h).unwrap());
    for b1 in Block::ALL {
        for b2 in Block::ALL {
            let blk = c.block(b1, b2);
            assert_eq!(blk.dim(), (q1.block_len(b1), q2.block_len(b2)));
            for ((i, j), v) in blk.indexed_iter() {
                let e = gh.block(b1)[i] * hh.block(b2)[j];
                assert!((e - v).norm() < 1e-11 * (1.0 + e.norm()));
            }
        }
    }
    let f = random(16 * 12, &mut rng);
    let fast = p.forward(&f).unwrap().into_vec();
    let dense = dense_forward_2d(&q1, &q2, &f).unwrap();
    let err = max_err(&fast, &dense);
    let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(err < 1e-11 * scale);
    let cr = random(q1.len() * q2.len(), &mut rng);
    let mut back = vec![Complex64::new(0.0, 0.0); 16 * 12];
    p.inverse_into(&cr, &mut back).unwrap();
    let dense = dense_inverse_2d(&q1, &q2, &cr).unwrap();
    let err = max_err(&back, &dense);
    let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(err < 1e-11 * scale);
    assert_eq!(p.counts(), (2, 1));
}

#[test]
fn two_d_one_hot_pair() {
    let q = quad(16, 12, 1);
    let p = Plan2D::new(&q, &q).unwrap();
    let mut c = SpectralCoeffs2D::zeros(&q, &q);
    c.block_mut(Block::A1, Block::A1)[[1, 2]] = Complex64::new(1.0, 0.0);
    let (z, w) = (q.block_nodes(Block::A1)[1], q.block_nodes(Block::A1)[2]);
    let f = p.inverse(&c).unwrap();
    let grid = q.grid();
    for (j1, x) in grid.iter().enumerate() {
        for (j2, y) in grid.iter().enumerate() {
            let e = (I * (z * x + w * y)).exp();
            assert!((f[j1 * 16 + j2] - e).norm() < 1e-13 * e.norm());
        }
    }
}
