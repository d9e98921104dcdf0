use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use super::{CMode, GammaTransform, Plan1D, SpectralCoeffs2D};
use crate::contour::GammaQuadrature;
use crate::{Error, Result};

/// Fast 2D transform pair on `Γ₁ × Γ₂`, applied one dimension at a time.
///
/// Every block pair `(b₁, b₂)` is the tensor product of the 1D block
/// transforms, so running the full 1D plan along rows and then along columns
/// produces all 25 blocks at once.
#[derive(Debug)]
pub struct Plan2D {
    pub p1: Plan1D,
    pub p2: Plan1D,
    fwd_calls: AtomicUsize,
    inv_calls: AtomicUsize,
}

fn transpose(src: &[Complex64], rows: usize, cols: usize, dst: &mut [Complex64]) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl Plan2D {
    pub fn new(q1: &GammaQuadrature, q2: &GammaQuadrature) -> Result<Self> {
        Self::with_mode(q1, q2, CMode::Auto)
    }

    pub fn with_mode(q1: &GammaQuadrature, q2: &GammaQuadrature, mode: CMode) -> Result<Self> {
        Ok(Plan2D {
            p1: Plan1D::with_mode(q1, mode)?,
            p2: Plan1D::with_mode(q2, mode)?,
            fwd_calls: AtomicUsize::new(0),
            inv_calls: AtomicUsize::new(0),
        })
    }

    pub fn forward(&self, f: &[Complex64]) -> Result<SpectralCoeffs2D> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeff_len()];
        self.forward_into(f, &mut out)?;
        SpectralCoeffs2D::from_vec(&self.p1.quad, &self.p2.quad, out)
    }

    pub fn inverse(&self, c: &SpectralCoeffs2D) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid_len()];
        let flat: Vec<Complex64> = c.data.iter().copied().collect();
        self.inverse_into(&flat, &mut out)?;
        Ok(out)
    }
}

impl GammaTransform for Plan2D {
    fn dim(&self) -> usize {
        2
    }

    fn quadratures(&self) -> Vec<&GammaQuadrature> {
        vec![&self.p1.quad, &self.p2.quad]
    }

    fn grid_len(&self) -> usize {
        self.p1.m() * self.p2.m()
    }

    fn coeff_len(&self) -> usize {
        self.p1.n() * self.p2.n()
    }

    fn forward_into(&self, f: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let (m1, m2, n1, n2) = (self.p1.m(), self.p2.m(), self.p1.n(), self.p2.n());
        if f.len() != m1 * m2 {
            return Err(Error::shape(m1 * m2, f.len()));
        }
        if out.len() != n1 * n2 {
            return Err(Error::shape(n1 * n2, out.len()));
        }
        self.fwd_calls.fetch_add(1, Ordering::Relaxed);
        let zero = Complex64::new(0.0, 0.0);
        let mut rows = vec![zero; m1 * n2];
        self.p2.forward_many(f, &mut rows, m1)?;
        let mut cols = vec![zero; n2 * m1];
        transpose(&rows, m1, n2, &mut cols);
        let mut cols_hat = vec![zero; n2 * n1];
        self.p1.forward_many(&cols, &mut cols_hat, n2)?;
        transpose(&cols_hat, n2, n1, out);
        Ok(())
    }

    fn inverse_into(&self, c: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let (m1, m2, n1, n2) = (self.p1.m(), self.p2.m(), self.p1.n(), self.p2.n());
        if c.len() != n1 * n2 {
            return Err(Error::shape(n1 * n2, c.len()));
        }
        if out.len() != m1 * m2 {
            return Err(Error::shape(m1 * m2, out.len()));
        }
        self.inv_calls.fetch_add(1, Ordering::Relaxed);
        let zero = Complex64::new(0.0, 0.0);
        let mut cols_hat = vec![zero; n2 * n1];
        transpose(c, n1, n2, &mut cols_hat);
        let mut cols = vec![zero; n2 * m1];
        self.p1.inverse_many(&cols_hat, &mut cols, n2)?;
        let mut rows = vec![zero; m1 * n2];
        transpose(&cols, n2, m1, &mut rows);
        self.p2.inverse_many(&rows, out, m1)
    }

    fn counts(&self) -> (usize, usize) {
        (self.fwd_calls.load(Ordering::Relaxed), self.inv_calls.load(Ordering::Relaxed))
    }
}
