//! Fast transforms against literal summation on seeded random data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contour::{build_quadrature, Block, ContourConfig, GammaQuadrature};
use crate::xform::{
    dense_forward_1d, dense_forward_2d, dense_inverse_1d, dense_inverse_2d, CMode, Plan1D, Plan2D, SpectralCoeffs1D,
    SpectralCoeffs2D,
};
use crate::Result;

/// One compared quantity, worst case over all seeds.
#[derive(Debug, Clone, Serialize)]
pub struct TransformCheckRow {
    pub transform: String,
    pub block: String,
    pub max_rel_error: f64,
    pub tolerance: f64,
}

impl TransformCheckRow {
    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformCheck {
    pub eps: f64,
    pub m: usize,
    pub ne: usize,
    pub p: usize,
    pub q: usize,
    pub nr: usize,
    pub seeds: u64,
    pub cmode: CMode,
    pub tol_1d: f64,
    pub tol_2d: f64,
    pub include_2d: bool,
}

impl Default for TransformCheck {
    fn default() -> Self {
        TransformCheck {
            eps: 1e-10,
            m: 64,
            ne: 48,
            p: 8,
            q: 10,
            nr: 2,
            seeds: 20,
            cmode: CMode::Auto,
            tol_1d: 1e-12,
            tol_2d: 1e-11,
            include_2d: true,
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn quad(c: &TransformCheck, d: usize) -> Result<GammaQuadrature> {
    let mut cfg = ContourConfig::new(c.eps, c.m, c.ne);
    cfg.p = c.p;
    cfg.q = c.q;
    cfg.nr = c.nr;
    cfg.d = d;
    build_quadrature(&cfg)
}

/// Compares every block of the fast transforms with dense sums.
///
/// 1D forward errors are relative to `‖f‖₁`; 1D inverse errors (one block of
/// coefficients at a time) and all 2D errors are relative to the largest
/// dense output value.
pub fn transform_check(c: &TransformCheck) -> Result<Vec<TransformCheckRow>> {
    let mut rows = Vec::new();
    let q1 = quad(c, 1)?;
    let plan = Plan1D::with_mode(&q1, c.cmode)?;
    let mut fwd = [0.0f64; 5];
    let mut inv = [0.0f64; 5];
    for seed in 0..c.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_vec(&mut rng, c.m);
        let norm1: f64 = f.iter().map(|z| z.norm()).sum();
        let fast = plan.forward(&f)?;
        let dense = dense_forward_1d(&q1, &f)?;
        for b in Block::ALL {
            let r = q1.range(b);
            fwd[b.index()] = fwd[b.index()].max(max_diff(fast.block(b), &dense[r]) / norm1);
        }
        for b in Block::ALL {
            let r = q1.range(b);
            if r.is_empty() {
                continue;
            }
            let mut coeffs = vec![Complex64::new(0.0, 0.0); q1.len()];
            coeffs[r.clone()].copy_from_slice(&random_vec(&mut rng, r.len()));
            let dense = dense_inverse_1d(&q1, &coeffs)?;
            let fast = plan.inverse(&SpectralCoeffs1D::from_vec(&q1, coeffs)?)?;
            inv[b.index()] = inv[b.index()].max(max_diff(&fast, &dense) / max_abs(&dense));
        }
    }
    for b in Block::ALL {
        if q1.range(b).is_empty() {
            continue;
        }
        rows.push(TransformCheckRow {
            transform: "1d forward".into(),
            block: b.name().into(),
            max_rel_error: fwd[b.index()],
            tolerance: c.tol_1d,
        });
        rows.push(TransformCheckRow {
            transform: "1d inverse".into(),
            block: b.name().into(),
            max_rel_error: inv[b.index()],
            tolerance: c.tol_1d,
        });
    }
    if !c.include_2d {
        return Ok(rows);
    }

    let q2 = quad(c, 2)?;
    let plan2 = Plan2D::with_mode(&q2, &q2, c.cmode)?;
    let n = q2.len();
    let mut fwd2 = [[0.0f64; 5]; 5];
    let mut inv2 = 0.0f64;
    for seed in 0..c.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let f = random_vec(&mut rng, c.m * c.m);
        let fast = plan2.forward(&f)?;
        let dense = dense_forward_2d(&q2, &q2, &f)?;
        let scale = max_abs(&dense);
        for b1 in Block::ALL {
            for b2 in Block::ALL {
                let (r1, r2) = (q2.range(b1), q2.range(b2));
                let view = fast.block(b1, b2);
                let mut worst = 0.0f64;
                for (i, k1) in r1.clone().enumerate() {
                    for (j, k2) in r2.clone().enumerate() {
                        worst = worst.max((view[(i, j)] - dense[k1 * n + k2]).norm());
                    }
                }
                let e = &mut fwd2[b1.index()][b2.index()];
                *e = e.max(worst / scale);
            }
        }
        let coeffs = random_vec(&mut rng, n * n);
        let dense = dense_inverse_2d(&q2, &q2, &coeffs)?;
        let fast = plan2.inverse(&SpectralCoeffs2D::from_vec(&q2, &q2, coeffs)?)?;
        inv2 = inv2.max(max_diff(&fast, &dense) / max_abs(&dense));
    }
    for b1 in Block::ALL {
        for b2 in Block::ALL {
            if q2.range(b1).is_empty() || q2.range(b2).is_empty() {
                continue;
            }
            rows.push(TransformCheckRow {
                transform: "2d forward".into(),
                block: format!("{}x{}", b1.name(), b2.name()),
                max_rel_error: fwd2[b1.index()][b2.index()],
                tolerance: c.tol_2d,
            });
        }
    }
    rows.push(TransformCheckRow {
        transform: "2d inverse".into(),
        block: "all".into(),
        max_rel_error: inv2,
        tolerance: c.tol_2d,
    });
    Ok(rows)
}
