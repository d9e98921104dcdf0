use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalized FFT on an `M^d` grid (`d = 1, 2`), row-major, counting calls.
pub struct FftNd {
    pub d: usize,
    pub m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    fwd_calls: AtomicUsize,
    inv_calls: AtomicUsize,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FftNd {{ d: {}, m: {} }}", self.d, self.m)
    }
}

fn transpose_square(a: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            a.swap(i * m + j, j * m + i);
        }
    }
}

impl FftNd {
    pub fn new(d: usize, m: usize) -> Self {
        let mut p = FftPlanner::new();
        FftNd {
            d,
            m,
            fwd: p.plan_fft_forward(m),
            inv: p.plan_fft_inverse(m),
            fwd_calls: AtomicUsize::new(0),
            inv_calls: AtomicUsize::new(0),
        }
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    fn apply(&self, plan: &Arc<dyn Fft<f64>>, a: &mut [Complex64]) {
        plan.process(a);
        if self.d == 2 {
            transpose_square(a, self.m);
            plan.process(a);
            transpose_square(a, self.m);
        }
    }

    /// `a ← Σ_j e^{-2πi jk/M} a_j`
    pub fn forward(&self, a: &mut [Complex64]) {
        self.fwd_calls.fetch_add(1, Ordering::Relaxed);
        self.apply(&self.fwd, a);
    }

    /// `a ← Σ_k e^{2πi jk/M} a_k`
    pub fn inverse(&self, a: &mut [Complex64]) {
        self.inv_calls.fetch_add(1, Ordering::Relaxed);
        self.apply(&self.inv, a);
    }

    pub fn counts(&self) -> (usize, usize) {
        (self.fwd_calls.load(Ordering::Relaxed), self.inv_calls.load(Ordering::Relaxed))
    }
}
