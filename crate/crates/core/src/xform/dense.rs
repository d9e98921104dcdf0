//! Literal summation, kept as the reference the fast plans are tested against.

use num_complex::Complex64;

use crate::contour::GammaQuadrature;
use crate::{Error, Result, I};

fn table(q: &GammaQuadrature, sign: f64) -> Vec<Complex64> {
    let grid = q.grid();
    let mut t = Vec::with_capacity(q.len() * grid.len());
    for z in &q.nodes {
        for x in &grid {
            t.push((I * sign * z * x).exp());
        }
    }
    t
}

pub fn dense_forward_1d(q: &GammaQuadrature, f: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = q.config.m;
    if f.len() != m {
        return Err(Error::shape(m, f.len()));
    }
    let t = table(q, -1.0);
    Ok((0..q.len())
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                acc += t[k * m + j] * f[j];
            }
            acc
        })
        .collect())
}

pub fn dense_inverse_1d(q: &GammaQuadrature, c: &[Complex64]) -> Result<Vec<Complex64>> {
    let (m, n) = (q.config.m, q.len());
    if c.len() != n {
        return Err(Error::shape(n, c.len()));
    }
    let t = table(q, 1.0);
    Ok((0..m)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += t[k * m + j] * c[k];
            }
            acc
        })
        .collect())
}

/// `f` is `M₁ × M₂` row-major; result is `N₁ × N₂` row-major.
pub fn dense_forward_2d(q1: &GammaQuadrature, q2: &GammaQuadrature, f: &[Complex64]) -> Result<Vec<Complex64>> {
    let (m1, m2) = (q1.config.m, q2.config.m);
    if f.len() != m1 * m2 {
        return Err(Error::shape(m1 * m2, f.len()));
    }
    let (t1, t2) = (table(q1, -1.0), table(q2, -1.0));
    let (n1, n2) = (q1.len(), q2.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n1 * n2];
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j1 in 0..m1 {
                for j2 in 0..m2 {
                    acc += t1[k1 * m1 + j1] * t2[k2 * m2 + j2] * f[j1 * m2 + j2];
                }
            }
            out[k1 * n2 + k2] = acc;
        }
    }
    Ok(out)
}

/// `c` is `N₁ × N₂` row-major; result is `M₁ × M₂` row-major.
pub fn dense_inverse_2d(q1: &GammaQuadrature, q2: &GammaQuadrature, c: &[Complex64]) -> Result<Vec<Complex64>> {
    let (n1, n2) = (q1.len(), q2.len());
    if c.len() != n1 * n2 {
        return Err(Error::shape(n1 * n2, c.len()));
    }
    let (t1, t2) = (table(q1, 1.0), table(q2, 1.0));
    let (m1, m2) = (q1.config.m, q2.config.m);
    let mut out = vec![Complex64::new(0.0, 0.0); m1 * m2];
    for j1 in 0..m1 {
        for j2 in 0..m2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in 0..n1 {
                for k2 in 0..n2 {
                    acc += t1[k1 * m1 + j1] * t2[k2 * m2 + j2] * c[k1 * n2 + k2];
                }
            }
            out[j1 * m2 + j2] = acc;
        }
    }
    Ok(out)
}
