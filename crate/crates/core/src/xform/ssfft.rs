//! Shifted and scaled FFT.
//!
//! Evaluates `ĉ_k = Σ_j e^{-iξ_k x_j} c_j` for `x_j = -1 + 2j/m` and
//! `ξ_k = α + (β - α)k/n` with one zero-padded FFT of length `ν`, valid when
//! `(β - α)/(mn) = π/ν`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

#[derive(Clone)]
pub struct SsfftPlan {
    pub m: usize,
    pub n: usize,
    pub nu: usize,
    pub alpha: f64,
    pub beta: f64,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    ipre: Vec<Complex64>,
    ipost: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SsfftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SsfftPlan")
            .field("m", &self.m)
            .field("n", &self.n)
            .field("nu", &self.nu)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .finish()
    }
}

impl SsfftPlan {
    /// Plan with `β = α + πmn/ν`.
    pub fn new(m: usize, n: usize, nu: usize, alpha: f64) -> Result<Self> {
        let beta = alpha + std::f64::consts::PI * (m * n) as f64 / nu as f64;
        Self::with_window(m, n, nu, alpha, beta)
    }

    /// Plan for an explicit window `[α, β)`; rejects windows off resonance.
    pub fn with_window(m: usize, n: usize, nu: usize, alpha: f64, beta: f64) -> Result<Self> {
        if m == 0 || n == 0 || nu < m.max(n) {
            return Err(Error::Config(format!("ssfft sizes m={m} n={n} need nu={nu} >= max(m, n)")));
        }
        let lhs = (beta - alpha) / (m * n) as f64;
        let rhs = std::f64::consts::PI / nu as f64;
        if (lhs - rhs).abs() > 1e-12 * rhs {
            return Err(Error::Config(format!("ssfft window off resonance: (β-α)/(mn) = {lhs}, π/ν = {rhs}")));
        }
        let d = (beta - alpha) / n as f64;
        let pre = (0..m).map(|j| Complex64::from_polar(1.0, -2.0 * alpha * j as f64 / m as f64)).collect();
        let post = (0..n).map(|k| Complex64::from_polar(1.0, alpha + d * k as f64)).collect();
        let ipre = (0..n).map(|k| Complex64::from_polar(1.0, -d * k as f64)).collect();
        let ipost = (0..m)
            .map(|j| Complex64::from_polar(1.0, alpha * (-1.0 + 2.0 * j as f64 / m as f64)))
            .collect();
        let mut planner = FftPlanner::new();
        Ok(SsfftPlan {
            m,
            n,
            nu,
            alpha,
            beta,
            pre,
            post,
            ipre,
            ipost,
            fft: planner.plan_fft_forward(nu),
            ifft: planner.plan_fft_inverse(nu),
        })
    }

    /// Output frequency `ξ_k`.
    pub fn xi(&self, k: usize) -> f64 {
        self.alpha + (self.beta - self.alpha) * k as f64 / self.n as f64
    }

    pub fn forward(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        if c.len() != self.m {
            return Err(Error::shape(self.m, c.len()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        self.forward_many(c, None, 1, &mut out, self.n, 0, false);
        Ok(out)
    }

    pub fn inverse(&self, ch: &[Complex64]) -> Result<Vec<Complex64>> {
        if ch.len() != self.n {
            return Err(Error::shape(self.n, ch.len()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.m];
        self.inverse_many(ch, self.n, 0, None, 1, &mut out, false);
        Ok(out)
    }

    /// Batched forward transform of `count` contiguous length-`m` inputs.
    ///
    /// Input `r` is scaled by `scale[j]` when given. Output `r` lands in
    /// `out[r*stride + offset ..][..n]`, added when `accumulate`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn forward_many(
        &self,
        c: &[Complex64],
        scale: Option<&[f64]>,
        count: usize,
        out: &mut [Complex64],
        stride: usize,
        offset: usize,
        accumulate: bool,
    ) {
        let (m, n, nu) = (self.m, self.n, self.nu);
        let mut buf = vec![Complex64::new(0.0, 0.0); nu * count];
        for r in 0..count {
            let src = &c[r * m..(r + 1) * m];
            let dst = &mut buf[r * nu..r * nu + m];
            match scale {
                Some(s) => {
                    for j in 0..m {
                        dst[j] = src[j] * self.pre[j] * s[j];
                    }
                }
                None => {
                    for j in 0..m {
                        dst[j] = src[j] * self.pre[j];
                    }
                }
            }
        }
        self.fft.process(&mut buf);
        for r in 0..count {
            let src = &buf[r * nu..r * nu + n];
            let dst = &mut out[r * stride + offset..r * stride + offset + n];
            if accumulate {
                for k in 0..n {
                    dst[k] += src[k] * self.post[k];
                }
            } else {
                for k in 0..n {
                    dst[k] = src[k] * self.post[k];
                }
            }
        }
    }

    /// Batched inverse: input `r` is `ch[r*stride + offset ..][..n]`; output `r`
    /// (times `scale[j]` when given) is added to or written into `out[r*m ..][..m]`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn inverse_many(
        &self,
        ch: &[Complex64],
        stride: usize,
        offset: usize,
        scale: Option<&[f64]>,
        count: usize,
        out: &mut [Complex64],
        accumulate: bool,
    ) {
        let (m, n, nu) = (self.m, self.n, self.nu);
        let mut buf = vec![Complex64::new(0.0, 0.0); nu * count];
        for r in 0..count {
            let src = &ch[r * stride + offset..r * stride + offset + n];
            let dst = &mut buf[r * nu..r * nu + n];
            for k in 0..n {
                dst[k] = src[k] * self.ipre[k];
            }
        }
        self.ifft.process(&mut buf);
        for r in 0..count {
            let src = &buf[r * nu..r * nu + m];
            let dst = &mut out[r * m..(r + 1) * m];
            for j in 0..m {
                let mut v = src[j] * self.ipost[j];
                if let Some(s) = scale {
                    v *= s[j];
                }
                if accumulate {
                    dst[j] += v;
                } else {
                    dst[j] = v;
                }
            }
        }
    }
}
