//! Interpolation of coefficients from one contour discretization to a refined one.

use crate::contour::{Block, GammaQuadrature};

/// Floater–Hormann barycentric weights of blending degree `d`.
fn floater_hormann_weights(x: &[f64], d: usize) -> Vec<f64> {
    let n = x.len();
    let d = d.min(n.saturating_sub(1));
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(d);
            let hi = k.min(n - 1 - d);
            let mut w = 0.0;
            for i in lo..=hi {
                let mut p = 1.0;
                for j in i..=i + d {
                    if j != k {
                        p /= (x[k] - x[j]).abs();
                    }
                }
                w += p;
            }
            if (k + d) % 2 == 0 {
                w
            } else {
                -w
            }
        })
        .collect()
}

fn lagrange_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|k| 1.0 / x.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, xj)| x[k] - xj).product::<f64>())
        .collect()
}

/// Row of the barycentric interpolation matrix at `t`.
fn barycentric_row(x: &[f64], w: &[f64], t: f64) -> Vec<f64> {
    if let Some(k) = x.iter().position(|xk| *xk == t) {
        let mut r = vec![0.0; x.len()];
        r[k] = 1.0;
        return r;
    }
    let terms: Vec<f64> = x.iter().zip(w).map(|(xk, wk)| wk / (t - xk)).collect();
    let s: f64 = terms.iter().sum();
    terms.into_iter().map(|v| v / s).collect()
}

/// Dense `N_fine × N_coarse` matrix mapping coefficients on `coarse` to
/// values at the nodes of `fine`, leg by leg in the contour parameter.
pub(crate) fn refinement_matrix(coarse: &GammaQuadrature, fine: &GammaQuadrature, degree: usize) -> Vec<Vec<(usize, f64)>> {
    let mut rows = vec![Vec::new(); fine.len()];
    let legs = [
        (coarse.range(Block::E1).start..coarse.range(Block::A1).end, fine.range(Block::E1).start..fine.range(Block::A1).end),
        (coarse.range(Block::A3).start..coarse.range(Block::E3).end, fine.range(Block::A3).start..fine.range(Block::E3).end),
    ];
    for (cr, fr) in legs {
        let x = &coarse.tau[cr.clone()];
        let w = floater_hormann_weights(x, degree);
        for i in fr {
            rows[i] = barycentric_row(x, &w, fine.tau[i])
                .into_iter()
                .enumerate()
                .filter(|(_, v)| *v != 0.0)
                .map(|(j, v)| (cr.start + j, v))
                .collect();
        }
    }
    let q = coarse.config.q;
    let c0 = coarse.range(Block::C).start;
    for i in fine.range(Block::C) {
        let t = fine.tau[i];
        let panel = coarse
            .panel_edges
            .windows(2)
            .position(|p| t >= p[0] && t <= p[1])
            .unwrap_or(0);
        let start = c0 + panel * q;
        let x = &coarse.tau[start..start + q];
        let w = lagrange_weights(x);
        rows[i] = barycentric_row(x, &w, t).into_iter().enumerate().map(|(j, v)| (start + j, v)).collect();
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floater_hormann_reproduces_polynomials() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.5 + if i == 3 { 0.1 } else { 0.0 }).collect();
        let w = floater_hormann_weights(&x, 6);
        for t in [0.3, 4.7, 11.1, 14.2] {
            let r = barycentric_row(&x, &w, t);
            let p = |s: f64| 1.0 - 2.0 * s + 0.3 * s.powi(3) - 0.01 * s.powi(6);
            let v: f64 = r.iter().zip(&x).map(|(a, s)| a * p(*s)).sum();
            assert!((v - p(t)).abs() < 1e-8 * p(t).abs().max(1.0), "{t}");
        }
    }

    #[test]
    fn gauss_panel_interpolation_exact_for_low_degree() {
        let (x, _) = crate::contour::gauss_legendre(8).unwrap();
        let w = lagrange_weights(&x);
        let r = barycentric_row(&x, &w, 0.123);
        let v: f64 = r.iter().zip(&x).map(|(a, s)| a * s.powi(7)).sum();
        assert!((v - 0.123f64.powi(7)).abs() < 1e-15);
    }
}
