//! Gauss-Legendre nodes and weights by Newton iteration.

use crate::{Error, Result};

/// Nodes (increasing) and weights of the `q`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Exact for polynomials of degree `2q - 1`.
pub fn gauss_legendre(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(1..=64).contains(&q) {
        return Err(Error::Config(format!("Gauss-Legendre order {q} outside 1..=64")));
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let half = q.div_ceil(2);
    for i in 0..half {
        // Chebyshev-like initial guess for the i-th largest root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                dp = legendre_with_derivative(q, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[q - 1 - i] = x;
        weights[q - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// `(P_n(x), P_n'(x))` from the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(q: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, w) = gauss_legendre(q)?;
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    Ok((x.iter().map(|t| c + r * t).collect(), w.iter().map(|v| r * v).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint() {
        let (x, w) = gauss_legendre(1).unwrap();
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn q4_exact_on_x6() {
        let (x, w) = gauss_legendre(4).unwrap();
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert!((s - 2.0 / 7.0).abs() < 1e-15, "{s}");
    }

    #[test]
    fn q16_gaussian_against_erf() {
        let (x, w) = gauss_legendre(16).unwrap();
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (-x * x).exp()).sum();
        // sqrt(pi) * erf(1), erf(1) to 20 digits
        let exact = std::f64::consts::PI.sqrt() * 0.842_700_792_949_714_869_34;
        assert!((s - exact).abs() < 1e-14, "{}", s - exact);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(65).is_err());
    }

    #[test]
    fn structure_for_all_orders() {
        for q in 1..=64 {
            let (x, w) = gauss_legendre(q).unwrap();
            assert!(x.windows(2).all(|p| p[0] < p[1]), "q={q}");
            assert!(x.iter().all(|t| t.abs() < 1.0));
            assert!(w.iter().all(|&v| v > 0.0));
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "q={q} sum={s}");
            // exactness on the highest degree monomial that should be integrated exactly
            let deg = 2 * q - 2;
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((m - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "q={q}");
        }
    }
}
