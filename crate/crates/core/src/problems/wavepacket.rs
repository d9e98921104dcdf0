//! Free Gaussian wavepacket.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Width `σ` and carrier wavenumber `k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketParams {
    pub sigma: f64,
    pub k0: f64,
}

impl WavepacketParams {
    /// `∫|u_wp|² dx = σ²`, constant in time.
    pub fn mass(&self) -> f64 {
        self.sigma * self.sigma
    }
}

impl Default for WavepacketParams {
    fn default() -> Self {
        WavepacketParams { sigma: 0.1, k0: 0.0 }
    }
}

/// Exact solution of `i u_t = -u_xx`:
///
/// ```text
/// u = σ^{3/2} / (π^{1/4} √(σ² + 2it)) · exp(-(x/√2 - iσk₀/2)² / (σ² + 2it) - k₀²/4)
/// ```
pub fn wavepacket(p: &WavepacketParams, x: f64, t: f64) -> Complex64 {
    let s = p.sigma;
    let den = Complex64::new(s * s, 2.0 * t);
    let pre = s * s.sqrt() / std::f64::consts::PI.powf(0.25);
    let a = Complex64::new(x / std::f64::consts::SQRT_2, -s * p.k0 / 2.0);
    pre / den.sqrt() * (-(a * a) / den - p.k0 * p.k0 / 4.0).exp()
}

/// Solution of `i u_t = -u_xx + i A u_x` with `φ = ∫A`: the free packet seen
/// from `x + φ(t)`.
pub fn wavepacket_advected(p: &WavepacketParams, x: f64, t: f64, phi: f64) -> Complex64 {
    wavepacket(p, x + phi, t)
}

/// Fourier transform `∫ e^{-iζx} u_wp(x, 0) dx` continued to complex `ζ`.
pub fn wavepacket_hat0(p: &WavepacketParams, zeta: Complex64) -> Complex64 {
    // u(x, 0) = √σ π^{-1/4} exp(-x²/(2σ²) + i b x) with b = k₀/(√2 σ)
    let s = p.sigma;
    let pre = s.sqrt() / std::f64::consts::PI.powf(0.25);
    let b = p.k0 / (std::f64::consts::SQRT_2 * s);
    let w = zeta - b;
    pre * s * (2.0 * std::f64::consts::PI).sqrt() * (-(s * s) * w * w / 2.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mass(p: &WavepacketParams, t: f64) -> f64 {
        let n = 40000;
        let l = 8.0 + 8.0 * t / p.sigma + 3.0 * p.k0 * t / p.sigma;
        let dx = 2.0 * l / n as f64;
        (0..n).map(|j| wavepacket(p, -l + j as f64 * dx, t).norm_sqr()).sum::<f64>() * dx
    }

    #[test]
    fn symmetric_real_at_start() {
        let p = WavepacketParams { sigma: 0.1, k0: 0.0 };
        for x in [0.05, 0.1, 0.3] {
            let a = wavepacket(&p, x, 0.0);
            assert!(a.im.abs() < 1e-15 * a.re.abs().max(1e-300));
            assert!((a - wavepacket(&p, -x, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn mass_is_conserved() {
        for k0 in [0.0, 30.0] {
            let p = WavepacketParams { sigma: 0.1, k0 };
            for t in [0.0, 0.05, 0.1] {
                assert!((mass(&p, t) - p.mass()).abs() < 1e-12 * p.mass(), "k0={k0} t={t}");
            }
        }
    }

    #[test]
    fn solves_free_equation() {
        let p = WavepacketParams { sigma: 1.0, k0: 2.0 };
        let (x, t, e) = (0.13, 0.02, 1e-4);
        let ut = (wavepacket(&p, x, t + e) - wavepacket(&p, x, t - e)) / (2.0 * e);
        let uxx = (wavepacket(&p, x + e, t) - 2.0 * wavepacket(&p, x, t) + wavepacket(&p, x - e, t)) / (e * e);
        let r = Complex64::i() * ut + uxx;
        assert!(r.norm() < 1e-6 * ut.norm(), "{r}");
    }

    #[test]
    fn spreading_of_peak() {
        let p = WavepacketParams { sigma: 0.1, k0: 0.0 };
        let s = p.sigma;
        for t in [0.01, 0.05, 0.2] {
            let ratio = wavepacket(&p, 0.0, t).norm() / wavepacket(&p, 0.0, 0.0).norm();
            let expect = s / (s.powi(4) + 4.0 * t * t).powf(0.25);
            assert!((ratio - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn hat_matches_quadrature() {
        let p = WavepacketParams { sigma: 0.1, k0: 12.0 };
        let n = 4000;
        let dx = 2.0 / n as f64;
        for z in [Complex64::new(3.0, -1.0), Complex64::new(-20.0, 2.0), Complex64::new(0.0, 0.0)] {
            let q: Complex64 = (0..n)
                .map(|j| {
                    let x = -1.0 + j as f64 * dx;
                    (-Complex64::i() * z * x).exp() * wavepacket(&p, x, 0.0)
                })
                .sum::<Complex64>()
                * dx;
            assert!((q - wavepacket_hat0(&p, z)).norm() < 1e-12, "{z}");
        }
    }
}
