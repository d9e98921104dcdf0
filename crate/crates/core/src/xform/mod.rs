//! Transforms between the uniform grid on `[-1,1]^d` and the nodes of `Γ^d`.
//!
//! Forward: `f̂_k = Σ_j e^{-iζ_k·x_j} f_j`. Inverse: `f_j = Σ_k e^{iζ_k·x_j} f̂_k`.
//! Neither applies quadrature weights or the `2/M` trapezoid factor.

mod cheb;
mod dense;
mod plan1d;
mod plan2d;
mod ssfft;

use std::ops::Range;

use ndarray::{s, Array2, ArrayView2, ArrayViewMut2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{Block, GammaQuadrature};
use crate::{Error, Result};

pub use cheb::{cheb_tolerance, ChebPlan};
pub use dense::{dense_forward_1d, dense_forward_2d, dense_inverse_1d, dense_inverse_2d};
pub use plan1d::Plan1D;
pub use plan2d::Plan2D;
pub use ssfft::SsfftPlan;

/// How the C block is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CMode {
    /// Direct when `N^C ≤ 4 n^(c)`.
    #[default]
    Auto,
    Direct,
    Chebyshev,
}

/// Common interface of the 1D and 2D plans, as used by the free-space solver.
///
/// Grids and coefficients are flat and row-major.
pub trait GammaTransform: Send + Sync {
    fn dim(&self) -> usize;
    fn quadratures(&self) -> Vec<&GammaQuadrature>;
    fn grid_len(&self) -> usize;
    fn coeff_len(&self) -> usize;
    fn forward_into(&self, f: &[Complex64], out: &mut [Complex64]) -> Result<()>;
    fn inverse_into(&self, c: &[Complex64], out: &mut [Complex64]) -> Result<()>;
    /// `(forward, inverse)` calls so far.
    fn counts(&self) -> (usize, usize);
}

fn block_offsets(q: &GammaQuadrature) -> [usize; 6] {
    let mut o = [0; 6];
    for b in Block::ALL {
        o[b.index() + 1] = q.range(b).end;
    }
    o
}

/// Coefficients on one contour, stored in contour order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs1D {
    pub data: Vec<Complex64>,
    offsets: [usize; 6],
}

impl SpectralCoeffs1D {
    pub fn zeros(q: &GammaQuadrature) -> Self {
        SpectralCoeffs1D { data: vec![Complex64::new(0.0, 0.0); q.len()], offsets: block_offsets(q) }
    }

    pub fn from_vec(q: &GammaQuadrature, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != q.len() {
            return Err(Error::shape(q.len(), data.len()));
        }
        Ok(SpectralCoeffs1D { data, offsets: block_offsets(q) })
    }

    pub fn range(&self, b: Block) -> Range<usize> {
        self.offsets[b.index()]..self.offsets[b.index() + 1]
    }

    pub fn block(&self, b: Block) -> &[Complex64] {
        &self.data[self.range(b)]
    }

    pub fn block_mut(&mut self, b: Block) -> &mut [Complex64] {
        let r = self.range(b);
        &mut self.data[r]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Coefficients on `Γ₁ × Γ₂`, an `N₁ × N₂` array whose 25 block pairs are
/// rectangular sub-views.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs2D {
    pub data: Array2<Complex64>,
    off1: [usize; 6],
    off2: [usize; 6],
}

impl SpectralCoeffs2D {
    pub fn zeros(q1: &GammaQuadrature, q2: &GammaQuadrature) -> Self {
        SpectralCoeffs2D {
            data: Array2::zeros((q1.len(), q2.len())),
            off1: block_offsets(q1),
            off2: block_offsets(q2),
        }
    }

    pub fn from_vec(q1: &GammaQuadrature, q2: &GammaQuadrature, data: Vec<Complex64>) -> Result<Self> {
        let n = q1.len() * q2.len();
        if data.len() != n {
            return Err(Error::shape(n, data.len()));
        }
        let data = Array2::from_shape_vec((q1.len(), q2.len()), data).map_err(|e| Error::Config(e.to_string()))?;
        Ok(SpectralCoeffs2D { data, off1: block_offsets(q1), off2: block_offsets(q2) })
    }

    fn ranges(&self, b1: Block, b2: Block) -> (Range<usize>, Range<usize>) {
        (
            self.off1[b1.index()]..self.off1[b1.index() + 1],
            self.off2[b2.index()]..self.off2[b2.index() + 1],
        )
    }

    pub fn block(&self, b1: Block, b2: Block) -> ArrayView2<'_, Complex64> {
        let (r1, r2) = self.ranges(b1, b2);
        self.data.slice(s![r1, r2])
    }

    pub fn block_mut(&mut self, b1: Block, b2: Block) -> ArrayViewMut2<'_, Complex64> {
        let (r1, r2) = self.ranges(b1, b2);
        self.data.slice_mut(s![r1, r2])
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        let (v, _) = self.data.into_raw_vec_and_offset();
        v
    }
}

#[cfg(test)]
mod tests;
