//! Chebyshev acceleration of the diagonal (C-type) block.
//!
//! On the diagonal `ζ = (1 - i)τ`, so `e^{∓iζx} = e^{∓(1+i)τx}`. Each kernel
//! row is replaced by its Chebyshev interpolant in `τ ∈ [-H, H]`.

use num_complex::Complex64;

use crate::contour::MACHINE_EPS;
use crate::{Error, Result};

const MAX_NC: usize = 4096;

#[derive(Debug, Clone)]
pub struct ChebPlan {
    pub nc: usize,
    pub height: f64,
    m: usize,
    nodes: usize,
    /// `λ_{l,j}`, `nc × m`
    lambda: Vec<Complex64>,
    /// `ρ_{l,j}`, `nc × m`
    rho: Vec<Complex64>,
    /// `T_l(τ_k / H)`, `nodes × nc`
    table: Vec<f64>,
    /// Largest residual seen at build, over both signs.
    pub residual: f64,
}

/// Residual floor for the interpolant: `max(eps, 64 ε e^H)`.
pub fn cheb_tolerance(eps: f64, height: f64) -> f64 {
    eps.max(64.0 * MACHINE_EPS * height.exp())
}

fn cheb_coeffs(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    (0..n)
        .map(|l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, s) in samples.iter().enumerate() {
                acc += s * (std::f64::consts::PI * l as f64 * (i as f64 + 0.5) / n as f64).cos();
            }
            let c = acc * (2.0 / n as f64);
            if l == 0 {
                c * 0.5
            } else {
                c
            }
        })
        .collect()
}

fn clenshaw(c: &[Complex64], t: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * t) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * t - b2
}

fn chebyshev_row(n: usize, t: f64, out: &mut [f64]) {
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = t;
    }
    for l in 2..n {
        out[l] = 2.0 * t * out[l - 1] - out[l - 2];
    }
}

/// Fits `e^{s(1+i)τx_j}` for every grid point; returns coefficients and the
/// worst residual on a dense sample.
fn fit(grid: &[f64], height: f64, nc: usize, sign: f64) -> (Vec<Complex64>, f64) {
    let m = grid.len();
    let cheb_t: Vec<f64> = (0..nc)
        .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / nc as f64).cos())
        .collect();
    let nsample = 3 * nc + 1;
    let sample_t: Vec<f64> = (0..nsample).map(|i| -1.0 + 2.0 * i as f64 / (nsample - 1) as f64).collect();
    let k = Complex64::new(sign, sign);
    let mut coef = vec![Complex64::new(0.0, 0.0); nc * m];
    let mut worst: f64 = 0.0;
    let mut samples = vec![Complex64::new(0.0, 0.0); nc];
    for (j, &x) in grid.iter().enumerate() {
        for (s, t) in samples.iter_mut().zip(&cheb_t) {
            *s = (k * (height * t * x)).exp();
        }
        let c = cheb_coeffs(&samples);
        for &t in &sample_t {
            let r = (clenshaw(&c, t) - (k * (height * t * x)).exp()).norm();
            worst = worst.max(r);
        }
        for (l, cl) in c.into_iter().enumerate() {
            coef[l * m + j] = cl;
        }
    }
    (coef, worst)
}

impl ChebPlan {
    /// Builds interpolants for grid `grid` on `[-H, H]`, growing `n^(c)` from
    /// `ceil(2H) + 8` until the residual meets [`cheb_tolerance`].
    pub fn new(grid: &[f64], height: f64, tau: &[f64], eps: f64) -> Result<Self> {
        let tol = cheb_tolerance(eps, height);
        let mut nc = (2.0 * height).ceil() as usize + 8;
        loop {
            let (lambda, r1) = fit(grid, height, nc, -1.0);
            let (rho, r2) = fit(grid, height, nc, 1.0);
            let residual = r1.max(r2);
            if residual <= tol {
                let mut table = vec![0.0; tau.len() * nc];
                for (k, t) in tau.iter().enumerate() {
                    chebyshev_row(nc, t / height, &mut table[k * nc..(k + 1) * nc]);
                }
                return Ok(ChebPlan { nc, height, m: grid.len(), nodes: tau.len(), lambda, rho, table, residual });
            }
            if nc >= MAX_NC {
                return Err(Error::Numerics(format!(
                    "Chebyshev interpolant residual {residual:e} above {tol:e} at n = {nc}"
                )));
            }
            nc = (2 * nc).min(MAX_NC);
        }
    }

    /// `ĉ_k = Σ_l T_l(τ_k/H) Σ_j λ_{l,j} f_j`, written into `out`.
    pub fn forward(&self, f: &[Complex64], out: &mut [Complex64]) {
        let (m, nc) = (self.m, self.nc);
        let mut y = vec![Complex64::new(0.0, 0.0); nc];
        for (l, yl) in y.iter_mut().enumerate() {
            let row = &self.lambda[l * m..(l + 1) * m];
            *yl = row.iter().zip(f).map(|(a, b)| a * b).sum();
        }
        for (k, o) in out.iter_mut().enumerate().take(self.nodes) {
            let t = &self.table[k * nc..(k + 1) * nc];
            *o = t.iter().zip(&y).map(|(a, b)| b * *a).sum();
        }
    }

    /// Adds `Σ_l ρ_{l,j} Σ_k T_l(τ_k/H) ĉ_k` into `out`.
    pub fn inverse_add(&self, ch: &[Complex64], out: &mut [Complex64]) {
        let (m, nc) = (self.m, self.nc);
        let mut z = vec![Complex64::new(0.0, 0.0); nc];
        for (k, c) in ch.iter().enumerate().take(self.nodes) {
            let t = &self.table[k * nc..(k + 1) * nc];
            for (zl, tl) in z.iter_mut().zip(t) {
                *zl += c * *tl;
            }
        }
        for (l, zl) in z.iter().enumerate() {
            let row = &self.rho[l * m..(l + 1) * m];
            for (o, r) in out.iter_mut().zip(row) {
                *o += r * zl;
            }
        }
    }
}
