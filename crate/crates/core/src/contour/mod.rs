//! The deformed frequency contour `Γ` and its quadrature.
//!
//! `Γ` runs along `Im ζ = +H` for `Re ζ < -H`, down the diagonal `ζ = τ - iτ`
//! for `|τ| ≤ H`, and along `Im ζ = -H` for `Re ζ > H`. After truncation at
//! `|Re ζ| = K` the horizontal legs carry an equispaced rule with a left
//! (inner) Alpert correction, and the diagonal carries composite Gauss panels
//! refined dyadically toward the origin.

mod alpert;
mod gauss;

use std::fmt::Write as _;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use alpert::{alpert_rule, AlpertRule};
pub use gauss::{gauss_legendre, gauss_legendre_on};

use crate::problems::FieldSpec;
use crate::{Error, Result};

/// IEEE double machine epsilon.
pub const MACHINE_EPS: f64 = f64::EPSILON;

/// Accuracy and resolution knobs for one spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourConfig {
    pub eps: f64,
    /// Physical grid points on `[-1, 1)`.
    pub m: usize,
    pub p: usize,
    /// Equispaced nodes per horizontal leg.
    pub ne: usize,
    pub q: usize,
    pub nr: usize,
    pub d: usize,
    pub phimax: f64,
    pub vnorm: f64,
}

impl ContourConfig {
    /// Defaults: `p = 8`, `q = 10`, `nr = 1`, `d = 1`, no field, no potential.
    pub fn new(eps: f64, m: usize, ne: usize) -> Self {
        ContourConfig { eps, m, p: 8, ne, q: 10, nr: 1, d: 1, phimax: 0.0, vnorm: 0.0 }
    }

    /// Sets `ne` so that the leg spacing is as close as possible to `h`.
    pub fn with_spacing(mut self, h: f64) -> Result<Self> {
        let kappa = alpert_rule(self.p)?.kappa;
        let target = std::f64::consts::PI * self.m as f64 / (2.0 * h);
        let ne = (target - (2 * kappa - 1) as f64).round();
        if ne < 1.0 {
            return Err(Error::Config(format!("spacing h = {h} too coarse for M = {}", self.m)));
        }
        self.ne = ne as usize;
        Ok(self)
    }

    /// Leg spacing `h = πM / (2(NE + 2κ - 1))`.
    pub fn leg_spacing(&self) -> Result<f64> {
        let kappa = alpert_rule(self.p)?.kappa;
        Ok(std::f64::consts::PI * self.m as f64 / (2.0 * (self.ne + 2 * kappa - 1) as f64))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > MACHINE_EPS) {
            return Err(Error::Config(format!("eps = {:e} must exceed machine epsilon", self.eps)));
        }
        if self.m == 0 || self.m % 2 != 0 {
            return Err(Error::Config(format!("M = {} must be positive and even", self.m)));
        }
        if self.p == 0 || self.q == 0 || self.ne == 0 {
            return Err(Error::Config("p, q and NE must be positive".into()));
        }
        if !(self.d == 1 || self.d == 2) {
            return Err(Error::Config(format!("d = {} must be 1 or 2", self.d)));
        }
        if self.ne <= self.m / 2 {
            return Err(Error::Config(format!("NE = {} must exceed M/2 = {}", self.ne, self.m / 2)));
        }
        if !(self.phimax >= 0.0) || !(self.vnorm >= 0.0) {
            return Err(Error::Config("phimax and vnorm must be non-negative".into()));
        }
        Ok(())
    }
}

/// Contour half-height `H` balancing damping against cancellation.
pub fn select_h(eps: f64, vnorm: f64, phimax: f64, d: usize) -> Result<f64> {
    if !(d == 1 || d == 2) {
        return Err(Error::Config(format!("d = {d} must be 1 or 2")));
    }
    if !(phimax >= 0.0) || !(vnorm >= 0.0) {
        return Err(Error::Config("phimax and vnorm must be non-negative".into()));
    }
    let arg = eps / ((1.0 + vnorm) * MACHINE_EPS);
    if !(arg > 1.0) {
        return Err(Error::Unattainable { eps, arg });
    }
    Ok(arg.ln() / (2.0 * d as f64 * (1.0 + phimax)))
}

/// Node blocks in contour order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    E1,
    A1,
    C,
    A3,
    E3,
}

impl Block {
    pub const ALL: [Block; 5] = [Block::E1, Block::A1, Block::C, Block::A3, Block::E3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Block::E1 => "E1",
            Block::A1 => "A1",
            Block::C => "C",
            Block::A3 => "A3",
            Block::E3 => "E3",
        }
    }
}

/// Discretized truncated contour.
#[derive(Debug, Clone)]
pub struct GammaQuadrature {
    pub config: ContourConfig,
    /// `H`
    pub height: f64,
    /// `K = H + πM/2`
    pub cutoff: f64,
    /// Leg spacing `h`.
    pub spacing: f64,
    pub kappa: usize,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    /// Real contour parameter `τ` of each node (`γ(τ) = ζ`).
    pub tau: Vec<f64>,
    /// `a_{-nr} .. a_{nr}`.
    pub panel_edges: Vec<f64>,
    pub alpert: AlpertRule,
    offsets: [usize; 6],
}

/// `γ(τ)`
pub fn gamma(tau: f64, height: f64) -> Complex64 {
    if tau < -height {
        Complex64::new(tau, height)
    } else if tau <= height {
        Complex64::new(tau, -tau)
    } else {
        Complex64::new(tau, -height)
    }
}

/// Builds the composite rule with `H` from [`select_h`].
pub fn build_quadrature(cfg: &ContourConfig) -> Result<GammaQuadrature> {
    cfg.validate()?;
    let h = select_h(cfg.eps, cfg.vnorm, cfg.phimax, cfg.d)?;
    GammaQuadrature::with_height(cfg, h)
}

impl GammaQuadrature {
    /// Builds the composite rule for a prescribed half-height `H`.
    pub fn with_height(cfg: &ContourConfig, height: f64) -> Result<Self> {
        cfg.validate()?;
        if !(height > 0.0) {
            return Err(Error::Config(format!("contour height {height} must be positive")));
        }
        let alp = alpert_rule(cfg.p)?;
        let kappa = alp.kappa;
        let cutoff = height + std::f64::consts::PI * cfg.m as f64 / 2.0;
        let h = (cutoff - height) / (cfg.ne + 2 * kappa - 1) as f64;

        // right leg, ascending
        let a3_tau: Vec<f64> = alp.nodes.iter().map(|x| height + x * h).collect();
        let a3_w: Vec<f64> = alp.weights.iter().map(|w| w * h).collect();
        let e3_tau: Vec<f64> = (0..cfg.ne).map(|k| height + (kappa + k) as f64 * h).collect();

        let mut edges_pos = vec![0.0];
        for k in 1..=cfg.nr {
            edges_pos.push(height / 2f64.powi((cfg.nr - k) as i32));
        }
        let mut panel_edges: Vec<f64> = edges_pos.iter().rev().map(|a| -a).collect();
        panel_edges.extend_from_slice(&edges_pos[1..]);
        if cfg.nr == 0 {
            panel_edges = vec![0.0];
        }

        let (gx, gw) = gauss_legendre(cfg.q)?;
        let mut c_tau = Vec::with_capacity(2 * cfg.nr * cfg.q);
        let mut c_w = Vec::with_capacity(2 * cfg.nr * cfg.q);
        for pair in panel_edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let r = 0.5 * (hi - lo);
            let c = 0.5 * (hi + lo);
            for (x, w) in gx.iter().zip(&gw) {
                c_tau.push(c + r * x);
                c_w.push(Complex64::new(1.0, -1.0) * (r * w));
            }
        }

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut tau = Vec::new();
        let mut offsets = [0usize; 6];
        let push = |t: f64, w: Complex64, nodes: &mut Vec<Complex64>, weights: &mut Vec<Complex64>, tau: &mut Vec<f64>| {
            tau.push(t);
            nodes.push(gamma(t, height));
            weights.push(w);
        };
        // E1: mirror of E3
        for t in e3_tau.iter().rev() {
            push(-t, Complex64::new(h, 0.0), &mut nodes, &mut weights, &mut tau);
        }
        offsets[1] = nodes.len();
        for (t, w) in a3_tau.iter().zip(&a3_w).rev() {
            push(-t, Complex64::new(*w, 0.0), &mut nodes, &mut weights, &mut tau);
        }
        offsets[2] = nodes.len();
        for (t, w) in c_tau.iter().zip(&c_w) {
            push(*t, *w, &mut nodes, &mut weights, &mut tau);
        }
        offsets[3] = nodes.len();
        for (t, w) in a3_tau.iter().zip(&a3_w) {
            push(*t, Complex64::new(*w, 0.0), &mut nodes, &mut weights, &mut tau);
        }
        offsets[4] = nodes.len();
        for t in &e3_tau {
            push(*t, Complex64::new(h, 0.0), &mut nodes, &mut weights, &mut tau);
        }
        offsets[5] = nodes.len();
        Ok(GammaQuadrature {
            config: *cfg,
            height,
            cutoff,
            spacing: h,
            kappa,
            nodes,
            weights,
            tau,
            panel_edges,
            alpert: alp,
            offsets,
        })
    }

    /// Total node count `N`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn range(&self, b: Block) -> Range<usize> {
        self.offsets[b.index()]..self.offsets[b.index() + 1]
    }

    pub fn block_len(&self, b: Block) -> usize {
        self.range(b).len()
    }

    pub fn block_nodes(&self, b: Block) -> &[Complex64] {
        &self.nodes[self.range(b)]
    }

    pub fn block_weights(&self, b: Block) -> &[Complex64] {
        &self.weights[self.range(b)]
    }

    pub fn block_tau(&self, b: Block) -> &[f64] {
        &self.tau[self.range(b)]
    }

    /// Which block holds global node index `k`.
    pub fn block_of(&self, k: usize) -> Block {
        *Block::ALL.iter().find(|b| self.range(**b).contains(&k)).expect("index in range")
    }

    /// Physical grid `x_j = -1 + 2j/M`, `j = 0..M`.
    pub fn grid(&self) -> Vec<f64> {
        physical_grid(self.config.m)
    }

    /// Applies the rule to `g(ζ)`.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, g: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| g(*z) * w).sum()
    }

    /// CSV with columns `block,re_zeta,im_zeta,re_w,im_w`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("block,re_zeta,im_zeta,re_w,im_w\n");
        for b in Block::ALL {
            for (z, w) in self.block_nodes(b).iter().zip(self.block_weights(b)) {
                let _ = writeln!(s, "{},{:.17e},{:.17e},{:.17e},{:.17e}", b.name(), z.re, z.im, w.re, w.im);
            }
        }
        s
    }

    /// Same contour with every leg spacing divided by `factor` and every
    /// diagonal panel split into `factor` sub-panels.
    pub fn refined(&self, factor: usize) -> Result<GammaQuadrature> {
        let factor = factor.max(1);
        let mut cfg = self.config;
        cfg.ne = factor * (self.config.ne + 2 * self.kappa - 1) + 1 - 2 * self.kappa;
        let mut q = Self::with_height(&cfg, self.height)?;
        if factor > 1 && q.block_len(Block::C) > 0 {
            let (gx, gw) = gauss_legendre(cfg.q)?;
            let mut c_tau = Vec::new();
            let mut c_w = Vec::new();
            for pair in self.panel_edges.windows(2) {
                let step = (pair[1] - pair[0]) / factor as f64;
                for s in 0..factor {
                    let lo = pair[0] + s as f64 * step;
                    let r = 0.5 * step;
                    for (x, w) in gx.iter().zip(&gw) {
                        c_tau.push(lo + r + r * x);
                        c_w.push(Complex64::new(1.0, -1.0) * (r * w));
                    }
                }
            }
            let c = q.range(Block::C);
            let added = c_tau.len() - c.len();
            q.tau.splice(c.clone(), c_tau.iter().copied());
            q.nodes.splice(c.clone(), c_tau.iter().map(|t| gamma(*t, self.height)));
            q.weights.splice(c, c_w);
            for o in q.offsets[3..].iter_mut() {
                *o += added;
            }
        }
        Ok(q)
    }
}

/// `x_j = -1 + 2j/M` for `j = 0..M`.
pub fn physical_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| -1.0 + 2.0 * j as f64 / m as f64).collect()
}

/// `max_t |φ(t)|` over `10⁴` uniform samples of `[0, T]` plus the endpoint.
pub fn quiver_radius(field: &FieldSpec, t_final: f64) -> Result<f64> {
    if field.is_zero() {
        return Ok(0.0);
    }
    const SAMPLES: usize = 10_000;
    let dt = t_final / SAMPLES as f64;
    let mut track = crate::problems::PhiTrack::new(field.clone(), dt);
    let mut best = 0.0f64;
    for s in 0..=SAMPLES {
        best = best.max(track.at_step(s)?.abs());
    }
    best = best.max(field.phi(t_final)?.abs());
    Ok(best)
}

/// Grid size `M` for which `K = H + πM/2` clears the numerical support of
/// `û₀` (threshold `eps` relative to its peak) plus `ceil(2H)` grid units.
pub fn suggest_grid_size<F: Fn(f64) -> f64>(u0: F, eps: f64, height: f64) -> usize {
    let fine = 4096;
    let xs = physical_grid(fine);
    let vals: Vec<f64> = xs.iter().map(|&x| u0(x)).collect();
    let hat = |xi: f64| -> f64 {
        let s: Complex64 = xs
            .iter()
            .zip(&vals)
            .map(|(x, v)| Complex64::from_polar(*v, -xi * x))
            .sum();
        s.norm() * 2.0 / fine as f64
    };
    let peak = hat(0.0).max(1e-300);
    let mut k0 = 0.0;
    let step = 0.25;
    let mut xi = 0.0;
    while xi < std::f64::consts::PI * fine as f64 / 4.0 {
        if hat(xi) > eps * peak {
            k0 = xi;
        }
        xi += step;
    }
    let m = (2.0 * (k0 - height).max(0.0) / std::f64::consts::PI).ceil() as usize + (2.0 * height).ceil() as usize;
    (m + 2).max(4) & !1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_h_fixture() {
        let h = select_h(1e-10, 0.0, 0.0, 1).unwrap();
        assert!((h - 6.508_901_229_588_35).abs() < 1e-12, "{h}");
        let h2 = select_h(1e-10, 0.0, 0.0, 2).unwrap();
        assert_eq!(h2, h / 2.0);
    }

    #[test]
    fn select_h_unattainable() {
        assert!(matches!(select_h(MACHINE_EPS, 0.0, 0.0, 1), Err(Error::Unattainable { .. })));
        assert!(select_h(MACHINE_EPS * 3.0, 2.0, 0.0, 1).is_err());
        assert!(select_h(1e-10, 0.0, 0.0, 3).is_err());
    }

    #[test]
    fn figure_configuration_count() {
        let mut cfg = ContourConfig::new(1e-10, 16, 16);
        cfg.p = 4;
        cfg.q = 4;
        cfg.nr = 4;
        let g = build_quadrature(&cfg).unwrap();
        assert_eq!(g.len(), 72);
        assert_eq!(g.panel_edges.len(), 9);
    }

    #[test]
    fn empty_diagonal_without_refinement() {
        let mut cfg = ContourConfig::new(1e-10, 32, 40);
        cfg.nr = 0;
        let g = build_quadrature(&cfg).unwrap();
        assert_eq!(g.block_len(Block::C), 0);
        assert_eq!(g.len(), 2 * 40 + 16);
    }

    #[test]
    fn rejects_coarse_legs() {
        let cfg = ContourConfig::new(1e-10, 64, 32);
        assert!(build_quadrature(&cfg).is_err());
    }

    #[test]
    fn spacing_formula_for_p8() {
        let cfg = ContourConfig::new(1e-10, 100, 301);
        let g = build_quadrature(&cfg).unwrap();
        let expect = std::f64::consts::PI * 100.0 / (2.0 * (301.0 + 13.0));
        assert!((g.spacing - expect).abs() < 1e-14);
        let c2 = cfg.with_spacing(expect).unwrap();
        assert_eq!(c2.ne, 301);
    }

    #[test]
    fn last_regular_node_and_cutoff() {
        let cfg = ContourConfig::new(1e-10, 64, 48);
        let g = build_quadrature(&cfg).unwrap();
        let e3 = g.block_nodes(Block::E3);
        let last = e3[e3.len() - 1].re;
        assert!((last - (g.cutoff - g.kappa as f64 * g.spacing)).abs() < 1e-12);
        assert!((e3[0].re - (g.height + g.kappa as f64 * g.spacing)).abs() < 1e-12);
    }

    #[test]
    fn csv_has_all_rows() {
        let cfg = ContourConfig::new(1e-10, 16, 10);
        let g = build_quadrature(&cfg).unwrap();
        let csv = g.to_csv();
        assert_eq!(csv.lines().count(), g.len() + 1);
        assert!(csv.starts_with("block,re_zeta"));
    }

    #[test]
    fn quiver_radius_zero_field() {
        assert_eq!(quiver_radius(&FieldSpec::Zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn refinement_keeps_contour() {
        let cfg = ContourConfig::new(1e-10, 32, 40);
        let g = build_quadrature(&cfg).unwrap();
        let r = g.refined(3).unwrap();
        assert!((r.spacing * 3.0 - g.spacing).abs() < 1e-13);
        assert_eq!(r.block_len(Block::C), 3 * g.block_len(Block::C));
        let s: Complex64 = r.block_weights(Block::C).iter().sum();
        assert!((s - Complex64::new(2.0, -2.0) * g.height).norm() < 1e-13);
        let f = |z: Complex64| (-z * z * 0.01).exp();
        assert!((r.integrate(f) - g.integrate(f)).norm() < 1e-10);
    }
}
