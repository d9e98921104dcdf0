//! Lowest bound state of `-Δ + V` by dense pseudo-spectral eigensolves.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::potential::{Potential, PotentialSpec};
use crate::contour::gauss_legendre;
use crate::{Error, Result};

/// Normalized ground state and its energy.
///
/// In 1D `values` are samples on the periodic grid `x_j = -π + 2πj/N`. For the
/// 2D radial problem they are samples of the radial profile on the half-shifted
/// grid `r_j = -π + (j + ½)2π/N` (even extension).
#[derive(Debug, Clone)]
pub struct GroundState {
    pub eigenvalue: f64,
    pub residual: f64,
    pub dim: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Cosine/Fourier coefficients used for interpolation (`k = 0..N/2` for the
    /// radial profile, `k = -N/2..N/2-1` in FFT order in 1D).
    coeffs: Vec<Complex64>,
}

impl GroundState {
    /// Trigonometric interpolant at a point (`x.len() == dim`).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.grid.len();
        if self.dim == 1 {
            let mut s = Complex64::new(0.0, 0.0);
            for (idx, c) in self.coeffs.iter().enumerate() {
                let k = if idx < n / 2 { idx as f64 } else { idx as f64 - n as f64 };
                if idx == n / 2 {
                    s += c * (k * (x[0] + PI)).cos();
                } else {
                    s += c * Complex64::from_polar(1.0, k * (x[0] + PI));
                }
            }
            s.re
        } else {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            self.eval_radial(r)
        }
    }

    fn eval_radial(&self, r: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(k, c)| c.re * (k as f64 * r).cos()).sum()
    }

    /// Samples on a tensor grid given per-axis coordinates (row-major).
    pub fn sample(&self, axes: &[Vec<f64>]) -> Vec<Complex64> {
        match axes.len() {
            1 => axes[0].iter().map(|&x| Complex64::new(self.eval(&[x]), 0.0)).collect(),
            _ => {
                let mut out = Vec::with_capacity(axes[0].len() * axes[1].len());
                for &x in &axes[0] {
                    for &y in &axes[1] {
                        out.push(Complex64::new(self.eval(&[x, y]), 0.0));
                    }
                }
                out
            }
        }
    }
}

/// Fourier second-derivative matrix entry on an `n`-point periodic grid of spacing `h`.
fn d2_entry(k: isize, n: usize, h: f64) -> f64 {
    if k == 0 {
        -PI * PI / (3.0 * h * h) - 1.0 / 6.0
    } else {
        let s = (k as f64 * h / 2.0).sin();
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let _ = n;
        -0.5 * sign / (s * s)
    }
}

fn d1_entry(k: isize, h: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        0.5 * sign / (k as f64 * h / 2.0).tan()
    }
}

/// Ground state of `-d²/dx² + V(x)` on the `2π`-periodic embedding `[-π, π)`.
pub fn ground_state_1d<F: Fn(f64) -> f64>(v: F, n: usize) -> Result<GroundState> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::Config(format!("eigensolver size {n} must be even and >= 8")));
    }
    let h = 2.0 * PI / n as f64;
    let grid: Vec<f64> = (0..n).map(|j| -PI + j as f64 * h).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| v(x)).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            a[(j, l)] = -d2_entry(j as isize - l as isize, n, h);
        }
        a[(j, j)] += vals[j];
    }
    let eig = SymmetricEigen::new(a.clone());
    let (imin, &e0) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .ok_or_else(|| Error::Numerics("empty spectrum".into()))?;
    let mut u: DVector<f64> = eig.eigenvectors.column(imin).into_owned();
    let (_, peak) = u.iter().enumerate().fold((0, 0.0f64), |acc, (i, x)| if x.abs() > acc.1.abs() { (i, *x) } else { acc });
    let norm = (u.norm_squared() * h).sqrt();
    u *= peak.signum() / norm;
    let r = &a * &u - &u * e0;
    let residual = (r.norm_squared() * h).sqrt();
    if !(residual <= 1e-9) {
        return Err(Error::Numerics(format!("ground-state residual {residual:e} above 1e-9")));
    }
    let values: Vec<f64> = u.iter().copied().collect();
    let coeffs: Vec<Complex64> = (0..n)
        .map(|idx| {
            let k = if idx < n / 2 { idx as f64 } else { idx as f64 - n as f64 };
            values
                .iter()
                .enumerate()
                .map(|(j, &x)| Complex64::from_polar(x, -k * j as f64 * h))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    Ok(GroundState { eigenvalue: e0, residual, dim: 1, grid, values, coeffs })
}

/// Radially symmetric ground state of `-Δ + V(|x|)` in the plane.
///
/// Solves `-u'' - u'/r + V u = E u` for even `u` on `[-π, π]` by shifted
/// inverse iteration with shift `shift` (below the ground energy).
pub fn ground_state_radial<F: Fn(f64) -> f64>(v: F, n: usize, shift: f64) -> Result<GroundState> {
    if n < 8 || n % 4 != 0 {
        return Err(Error::Config(format!("radial eigensolver size {n} must be a multiple of 4")));
    }
    let h = 2.0 * PI / n as f64;
    let grid: Vec<f64> = (0..n).map(|j| -PI + (j as f64 + 0.5) * h).collect();
    let half = n / 2;
    // unknowns: r_j for j = half..n (positive half); mirror of l is n-1-l
    let mut a = DMatrix::<f64>::zeros(half, half);
    for jj in 0..half {
        let j = half + jj;
        let r = grid[j];
        for ll in 0..half {
            let l = half + ll;
            let m = n - 1 - l;
            let k1 = j as isize - l as isize;
            let k2 = j as isize - m as isize;
            let d2 = d2_entry(k1, n, h) + d2_entry(k2, n, h);
            let d1 = d1_entry(k1, h) + d1_entry(k2, h);
            a[(jj, ll)] = -d2 - d1 / r;
        }
        a[(jj, jj)] += v(r);
    }
    let mut shifted = a.clone();
    for i in 0..half {
        shifted[(i, i)] -= shift;
    }
    let lu = shifted.lu();
    let mut x = DVector::<f64>::from_element(half, 1.0);
    let mut e = shift;
    let mut last = f64::INFINITY;
    for _ in 0..500 {
        let y = lu.solve(&x).ok_or_else(|| Error::Numerics("singular shifted operator".into()))?;
        let yn = y.norm();
        x = y / yn;
        let ax = &a * &x;
        e = x.dot(&ax);
        let residual = (&ax - &x * e).norm();
        if residual <= 1e-14 * e.abs().max(1.0) || residual >= 0.9 * last {
            break;
        }
        last = residual;
    }
    let profile: Vec<f64> = (0..n)
        .map(|j| if j >= half { x[j - half] } else { x[n - 1 - j - half] })
        .collect();
    // cosine series u(r) = Σ_k a_k cos(k r), k = 0..=n/2
    let coeffs: Vec<Complex64> = (0..=half)
        .map(|k| {
            let s: f64 = grid.iter().zip(&profile).map(|(r, u)| u * (k as f64 * r).cos()).sum();
            let f = if k == 0 || k == half { 1.0 } else { 2.0 };
            Complex64::new(f * s / n as f64, 0.0)
        })
        .collect();
    let mut gs = GroundState { eigenvalue: e, residual: 0.0, dim: 2, grid: grid.clone(), values: profile, coeffs };
    // normalize ∫ u² 2πr dr = 1 with panels on [0, π]
    let (gx, gw) = gauss_legendre(16)?;
    let panels = 128;
    let mut mass = 0.0;
    for p in 0..panels {
        let lo = PI * p as f64 / panels as f64;
        let rr = 0.5 * PI / panels as f64;
        for (t, w) in gx.iter().zip(&gw) {
            let r = lo + rr + rr * t;
            mass += w * rr * 2.0 * PI * r * gs.eval_radial(r).powi(2);
        }
    }
    let peak = gs.eval_radial(0.0);
    let scale = peak.signum() / mass.sqrt();
    for c in gs.coeffs.iter_mut() {
        *c *= scale;
    }
    for u in gs.values.iter_mut() {
        *u *= scale;
    }
    // residual in the radial L² norm (∫ |·|² 2πr dr on the grid)
    let ux = DVector::from_iterator(half, gs.values[half..].iter().copied());
    let rv = &a * &ux - &ux * e;
    let residual = (0..half).map(|i| rv[i] * rv[i] * 2.0 * PI * grid[half + i] * h).sum::<f64>().sqrt();
    gs.residual = residual;
    if !(residual <= 1e-9) {
        return Err(Error::Numerics(format!("radial ground-state residual {residual:e} above 1e-9")));
    }
    Ok(gs)
}

fn cache() -> &'static Mutex<HashMap<String, Arc<GroundState>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<GroundState>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Ground state of a named potential in `dim` dimensions, memoized.
///
/// `dim = 2` requires a radially symmetric potential.
pub fn ground_state(potential: &PotentialSpec, dim: usize, n: usize) -> Result<Arc<GroundState>> {
    let key = format!("{potential:?}/{dim}/{n}");
    if let Some(g) = cache().lock().expect("cache lock").get(&key) {
        return Ok(g.clone());
    }
    let gs = match (dim, *potential) {
        (1, p) => ground_state_1d(|x| p.value(&[x], 0.0), n)?,
        (2, PotentialSpec::GaussianWell { v0, beta }) => {
            let p = PotentialSpec::GaussianWell { v0, beta };
            ground_state_radial(|r| p.value(&[r], 0.0), n, -v0.abs())?
        }
        (2, other) => {
            return Err(Error::Config(format!("2D ground state needs a radial potential, got {other:?}")));
        }
        (d, _) => return Err(Error::Config(format!("ground state in {d} dimensions unsupported"))),
    };
    let gs = Arc::new(gs);
    cache().lock().expect("cache lock").insert(key, gs.clone());
    Ok(gs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_levels() {
        // -u'' + 64x² u has ground energy 8 with u ∝ exp(-4x²)
        let g = ground_state_1d(|x| 64.0 * x * x, 256).unwrap();
        assert!((g.eigenvalue - 8.0).abs() < 1e-9, "{}", g.eigenvalue);
        let exact = (-4.0f64 * 0.3 * 0.3).exp() / (PI / 8.0).powf(0.25);
        assert!((g.eval(&[0.3]) - exact).abs() < 1e-9);
        assert!(g.residual <= 1e-9);
    }

    #[test]
    fn radial_harmonic_oscillator() {
        // -Δu + 64|x|² u in 2D has ground energy 16 with u ∝ exp(-4r²)
        let g = ground_state_radial(|r| 64.0 * r * r, 256, -1.0).unwrap();
        assert!((g.eigenvalue - 16.0).abs() < 1e-9, "{}", g.eigenvalue);
        let exact = (-4.0f64 * 0.4 * 0.4).exp() / (PI / 8.0).sqrt();
        assert!((g.eval(&[0.4, 0.0]) - exact).abs() < 1e-9);
        assert!((g.eval(&[0.0, -0.4]) - exact).abs() < 1e-9);
    }
}
