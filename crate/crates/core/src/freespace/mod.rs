//! Free-space marching on `[-1,1]^d` with coefficients on `Γ^d`.
//!
//! The recurrences are those of the periodic solver with `|k|²` replaced by
//! the complex square `ζ·ζ`, the FFT replaced by the `Γ` transforms, and
//!
//! ```text
//! (V̂u)(ζ) = (2/M)^d Σ_j e^{-iζ·x_j} (Vu)_j
//! u(x_j)  = (2π)^{-d} Σ_k e^{iζ_k·x_j} w_k W_k / (1 + iμ₀ΔtV)
//! ```
//!
//! `û` is only ever advanced by the recurrence, never recomputed from `u`.

mod interp;

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{build_quadrature, physical_grid, ContourConfig, GammaQuadrature};
use crate::periodic::{richardson_extrapolate, AdamsScheme, HistoryEntry, Snapshot, RESONANCE_FLOOR};
use crate::problems::{sample_potential, FieldSpec, Potential};
use crate::xform::{CMode, GammaTransform, Plan1D, Plan2D};
use crate::{Error, Result, I};

/// Discretization of a free-space run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeConfig {
    /// One contour per dimension.
    pub contours: Vec<ContourConfig>,
    pub dt: f64,
    pub order: usize,
    pub steps: usize,
    #[serde(default)]
    pub cmode: CMode,
}

impl FreeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.contours.len()) {
            return Err(Error::Config(format!("{} contour configs; need 1 or 2", self.contours.len())));
        }
        for c in &self.contours {
            c.validate()?;
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Config(format!("time step {} must be positive", self.dt)));
        }
        AdamsScheme::new(self.order).map(|_| ())
    }
}

/// Builds the 1D or 2D transform for a list of quadratures.
pub fn build_transform(quads: &[GammaQuadrature], mode: CMode) -> Result<Box<dyn GammaTransform>> {
    match quads {
        [q] => Ok(Box::new(Plan1D::with_mode(q, mode)?)),
        [q1, q2] => Ok(Box::new(Plan2D::with_mode(q1, q2, mode)?)),
        _ => Err(Error::Config(format!("{} dimensions not supported", quads.len()))),
    }
}

#[derive(Debug, Clone)]
pub struct FreeState {
    pub t: f64,
    pub step: usize,
    pub phi: f64,
    pub u: Vec<Complex64>,
    pub uhat: Vec<Complex64>,
    pub history: VecDeque<HistoryEntry>,
}

#[derive(Debug, Clone)]
pub struct FreeTrajectory {
    pub state: FreeState,
    pub snapshots: Vec<Snapshot>,
    /// `(forward, inverse)` transform counts over the run.
    pub transform_counts: (usize, usize),
}

/// `e^{-iζ·ζ lΔt}` for `l = 1..=7`.
type PhaseCache = Mutex<HashMap<u64, Arc<Vec<Vec<Complex64>>>>>;

pub struct FreeSolver<'a> {
    pub d: usize,
    xf: Box<dyn GammaTransform>,
    quads: Vec<GammaQuadrature>,
    potential: &'a dyn Potential,
    field: FieldSpec,
    axes: Vec<Vec<f64>>,
    /// `ζ·ζ` per coefficient
    zz: Vec<Complex64>,
    /// `ζ₁` per first-axis index
    z1: Vec<Complex64>,
    /// Product weights per coefficient
    w: Vec<Complex64>,
    n2: usize,
    fwd_scale: f64,
    inv_scale: f64,
    static_v: Option<Vec<f64>>,
    phases: PhaseCache,
}

impl std::fmt::Debug for FreeSolver<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreeSolver").field("d", &self.d).field("coeffs", &self.zz.len()).finish_non_exhaustive()
    }
}

/// `ζ·ζ = ζ₁² + ζ₂² + ...`, the complex square used in every propagator.
pub fn zeta_dot_zeta(z: &[Complex64]) -> Complex64 {
    z.iter().map(|v| v * v).sum()
}

impl<'a> FreeSolver<'a> {
    pub fn new(
        quads: Vec<GammaQuadrature>,
        mode: CMode,
        potential: &'a dyn Potential,
        field: FieldSpec,
    ) -> Result<Self> {
        let xf = build_transform(&quads, mode)?;
        let d = quads.len();
        let axes: Vec<Vec<f64>> = quads.iter().map(|q| physical_grid(q.config.m)).collect();
        let (zz, w, n2) = match d {
            1 => (
                quads[0].nodes.iter().map(|z| zeta_dot_zeta(&[*z])).collect(),
                quads[0].weights.clone(),
                1,
            ),
            _ => {
                let (a, b) = (&quads[0], &quads[1]);
                let mut zz = Vec::with_capacity(a.len() * b.len());
                let mut w = Vec::with_capacity(a.len() * b.len());
                for (z1, w1) in a.nodes.iter().zip(&a.weights) {
                    for (z2, w2) in b.nodes.iter().zip(&b.weights) {
                        zz.push(zeta_dot_zeta(&[*z1, *z2]));
                        w.push(w1 * w2);
                    }
                }
                (zz, w, b.len())
            }
        };
        let fwd_scale = quads.iter().map(|q| 2.0 / q.config.m as f64).product();
        let inv_scale = (2.0 * std::f64::consts::PI).powi(-(d as i32));
        let mut s = FreeSolver {
            d,
            xf,
            z1: quads[0].nodes.clone(),
            quads,
            potential,
            field,
            axes,
            zz,
            w,
            n2,
            fwd_scale,
            inv_scale,
            static_v: None,
            phases: Mutex::new(HashMap::new()),
        };
        if potential.is_static() {
            s.static_v = Some(s.sample_v(0.0));
        }
        Ok(s)
    }

    /// Builds contours (with `H` from the selection rule) and plans from a config.
    pub fn from_config(cfg: &FreeConfig, potential: &'a dyn Potential, field: FieldSpec) -> Result<Self> {
        cfg.validate()?;
        let quads = cfg.contours.iter().map(build_quadrature).collect::<Result<Vec<_>>>()?;
        Self::new(quads, cfg.cmode, potential, field)
    }

    pub fn quadratures(&self) -> &[GammaQuadrature] {
        &self.quads
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn grid_len(&self) -> usize {
        self.xf.grid_len()
    }

    pub fn coeff_len(&self) -> usize {
        self.xf.coeff_len()
    }

    pub fn transform_counts(&self) -> (usize, usize) {
        self.xf.counts()
    }

    fn sample_v(&self, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.grid_len()];
        let axes: Vec<&[f64]> = self.axes.iter().map(|a| a.as_slice()).collect();
        sample_potential(self.potential, &axes, t, &mut v);
        v
    }

    fn potential_at(&self, t: f64) -> std::borrow::Cow<'_, [f64]> {
        match &self.static_v {
            Some(v) => std::borrow::Cow::Borrowed(v),
            None => std::borrow::Cow::Owned(self.sample_v(t)),
        }
    }

    /// `(2/M)^d · forward(f)`
    pub fn forward_scaled(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeff_len()];
        self.xf.forward_into(f, &mut out)?;
        out.iter_mut().for_each(|z| *z *= self.fwd_scale);
        Ok(out)
    }

    /// `(2π)^{-d} · inverse(w ⊙ c)`
    pub fn synthesize(&self, c: &[Complex64]) -> Result<Vec<Complex64>> {
        let weighted: Vec<Complex64> = c.iter().zip(&self.w).map(|(a, b)| a * b * self.inv_scale).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid_len()];
        self.xf.inverse_into(&weighted, &mut out)?;
        Ok(out)
    }

    fn vhat(&self, v: &[f64], u: &[Complex64]) -> Result<Vec<Complex64>> {
        let vu: Vec<Complex64> = u.iter().zip(v).map(|(a, b)| a * b).collect();
        self.forward_scaled(&vu)
    }

    fn phases(&self, dt: f64) -> Arc<Vec<Vec<Complex64>>> {
        let mut cache = self.phases.lock().expect("phase cache");
        cache
            .entry(dt.to_bits())
            .or_insert_with(|| {
                Arc::new((1..=7).map(|l| self.zz.iter().map(|z| (-I * z * (l as f64 * dt)).exp()).collect()).collect())
            })
            .clone()
    }

    /// Largest `|u₀|` on the outermost ring of grid points.
    pub fn boundary_magnitude(&self, u: &[Complex64]) -> f64 {
        let m1 = self.axes[0].len();
        match self.d {
            1 => u[0].norm().max(u[m1 - 1].norm()),
            _ => {
                let m2 = self.axes[1].len();
                let mut worst: f64 = 0.0;
                for j1 in 0..m1 {
                    for j2 in 0..m2 {
                        if j1 == 0 || j2 == 0 || j1 == m1 - 1 || j2 == m2 - 1 {
                            worst = worst.max(u[j1 * m2 + j2].norm());
                        }
                    }
                }
                worst
            }
        }
    }

    /// `û = (2/M)^d forward(u₀)`, history `[(2/M)^d forward(V u₀)]`.
    pub fn init(&self, u0: Vec<Complex64>) -> Result<FreeState> {
        if u0.len() != self.grid_len() {
            return Err(Error::shape(self.grid_len(), u0.len()));
        }
        let eps = self.quads.iter().map(|q| q.config.eps).fold(f64::INFINITY, f64::min);
        let edge = self.boundary_magnitude(&u0);
        if edge > eps.sqrt() {
            return Err(Error::Support { magnitude: edge, threshold: eps.sqrt() });
        }
        let uhat = self.forward_scaled(&u0)?;
        let vhat = self.vhat(&self.potential_at(0.0), &u0)?;
        let mut history = VecDeque::new();
        history.push_front(HistoryEntry { t: 0.0, phi: 0.0, vhat });
        Ok(FreeState { t: 0.0, step: 0, phi: 0.0, u: u0, uhat, history })
    }

    pub fn step_trapezoidal(&self, state: &mut FreeState, dt: f64) -> Result<()> {
        self.step_adams(state, &AdamsScheme::trapezoidal(), dt)
    }

    pub fn step_adams(&self, state: &mut FreeState, scheme: &AdamsScheme, dt: f64) -> Result<()> {
        let n = scheme.n;
        if state.history.len() < n - 1 {
            return Err(Error::InsufficientHistory { have: state.history.len(), need: n - 1 });
        }
        for (l, h) in state.history.iter().take(n - 1).enumerate() {
            if (h.t - (state.t - l as f64 * dt)).abs() > 1e-9 * dt.max(f64::MIN_POSITIVE) {
                return Err(Error::Config(format!(
                    "history entry {l} at t = {} does not match step {dt} from t = {}",
                    h.t, state.t
                )));
            }
        }
        let t_new = state.t + dt;
        let phi_new = self.field.phi_step(state.t, state.phi, t_new)?;
        let ph = self.phases(dt);
        let n1 = self.z1.len();
        let shifts: Option<Vec<Vec<Complex64>>> = (!self.field.is_zero()).then(|| {
            (1..n)
                .map(|l| {
                    let dphi = phi_new - state.history[l - 1].phi;
                    self.z1.iter().map(|z| (I * z * dphi).exp()).collect()
                })
                .collect()
        });
        let mut w = vec![Complex64::new(0.0, 0.0); self.coeff_len()];
        let first = |idx: usize| (idx / self.n2).min(n1 - 1);
        for (idx, wk) in w.iter_mut().enumerate() {
            let g = |l: usize| -> Complex64 {
                let base = ph[l - 1][idx];
                match &shifts {
                    Some(s) => base * s[l - 1][first(idx)],
                    None => base,
                }
            };
            let mut acc = g(1) * state.uhat[idx];
            for l in 1..n {
                acc -= I * (dt * scheme.mu[l]) * g(l) * state.history[l - 1].vhat[idx];
            }
            *wk = acc;
        }
        let mut u = self.synthesize(&w)?;
        let v = self.potential_at(t_new);
        let c0 = I * (scheme.mu[0] * dt);
        for (j, (uj, vj)) in u.iter_mut().zip(v.iter()).enumerate() {
            let den = 1.0 + c0 * vj;
            if den.norm() < RESONANCE_FLOOR {
                return Err(Error::Resonance { index: j, magnitude: den.norm() });
            }
            *uj /= den;
        }
        let vhat = self.vhat(&v, &u)?;
        for (wk, vk) in w.iter_mut().zip(&vhat) {
            *wk -= c0 * vk;
        }
        state.t = t_new;
        state.step += 1;
        state.phi = phi_new;
        state.u = u;
        state.uhat = w;
        state.history.push_front(HistoryEntry { t: t_new, phi: phi_new, vhat });
        state.history.truncate(n - 1);
        Ok(())
    }

    /// Richardson-extrapolated step applied to both `u` and `û`; the new
    /// history entry is the scaled transform of `V u` at the extrapolated grid.
    pub fn richardson_step(&self, state: &mut FreeState, dt: f64, levels: usize, keep: usize) -> Result<()> {
        let mut base = state.clone();
        base.history.truncate(1);
        let mut us = Vec::with_capacity(levels);
        let mut uhats = Vec::with_capacity(levels);
        let mut phi_end = state.phi;
        for i in 0..levels.max(1) {
            let sub = 1usize << i;
            let h = dt / sub as f64;
            let mut s = base.clone();
            for _ in 0..sub {
                self.step_trapezoidal(&mut s, h)?;
            }
            phi_end = s.phi;
            us.push(s.u);
            uhats.push(s.uhat);
        }
        let u = richardson_extrapolate(&us);
        let uhat = richardson_extrapolate(&uhats);
        let t_new = state.t + dt;
        let vhat = self.vhat(&self.potential_at(t_new), &u)?;
        state.history.push_front(HistoryEntry { t: t_new, phi: phi_end, vhat });
        state.history.truncate(keep.max(1));
        state.t = t_new;
        state.step += 1;
        state.phi = phi_end;
        state.u = u;
        state.uhat = uhat;
        Ok(())
    }

    pub fn richardson_startup(&self, state: &mut FreeState, scheme: &AdamsScheme, dt: f64) -> Result<()> {
        for _ in 0..scheme.n.saturating_sub(2) {
            self.richardson_step(state, dt, scheme.n / 2, scheme.n - 1)?;
        }
        Ok(())
    }

    /// Initialization, startup and marching.
    pub fn run(
        &self,
        u0: Vec<Complex64>,
        scheme: &AdamsScheme,
        dt: f64,
        steps: usize,
        snapshot_every: Option<usize>,
    ) -> Result<FreeTrajectory> {
        let before = self.xf.counts();
        let mut state = self.init(u0)?;
        let mut snapshots = Vec::new();
        let every = snapshot_every.filter(|k| *k > 0);
        if every.is_some() {
            snapshots.push(Snapshot { t: 0.0, u: state.u.clone() });
        }
        let startup = scheme.n.saturating_sub(2).min(steps);
        for s in 0..steps {
            if s < startup {
                self.richardson_step(&mut state, dt, scheme.n / 2, scheme.n - 1)?;
            } else {
                self.step_adams(&mut state, scheme, dt)?;
            }
            state.t = state.step as f64 * dt;
            if let Some(k) = every {
                if state.step % k == 0 {
                    snapshots.push(Snapshot { t: state.t, u: state.u.clone() });
                }
            }
        }
        let after = self.xf.counts();
        Ok(FreeTrajectory { state, snapshots, transform_counts: (after.0 - before.0, after.1 - before.1) })
    }

    /// `u` at arbitrary points with `max |x_i| ≤ r_ext`, summed on a contour
    /// refined by `ceil(r_ext)` with `û` interpolated onto it.
    pub fn evaluate_exterior(&self, state: &FreeState, points: &[Vec<f64>], r_ext: f64) -> Result<Vec<Complex64>> {
        let factor = r_ext.ceil().max(1.0) as usize;
        for p in points {
            if p.len() != self.d {
                return Err(Error::shape(self.d, p.len()));
            }
            for x in p {
                if x.abs() > r_ext {
                    return Err(Error::OutOfRange { what: "x", value: *x, lo: -r_ext, hi: r_ext });
                }
            }
        }
        let fine: Vec<GammaQuadrature> = self.quads.iter().map(|q| q.refined(factor)).collect::<Result<_>>()?;
        let mats: Vec<_> =
            self.quads.iter().zip(&fine).map(|(c, f)| interp::refinement_matrix(c, f, 10)).collect();
        // strip the oscillating part of the propagator before interpolating
        let demod = |q: &GammaQuadrature, axis: usize| -> Vec<Complex64> {
            let phi = if axis == 0 { state.phi } else { 0.0 };
            q.nodes.iter().map(|z| Complex64::from_polar(1.0, (z * z).re * state.t - z.re * phi)).collect()
        };
        let dc: Vec<Vec<Complex64>> = self.quads.iter().enumerate().map(|(i, q)| demod(q, i)).collect();
        let df: Vec<Vec<Complex64>> = fine.iter().enumerate().map(|(i, q)| demod(q, i)).collect();
        let refined: Vec<Complex64> = match self.d {
            1 => mats[0]
                .iter()
                .zip(&df[0])
                .map(|(row, f)| row.iter().map(|(j, a)| state.uhat[*j] * dc[0][*j] * a).sum::<Complex64>() * f.conj())
                .collect(),
            _ => {
                let (nc1, nc2, nf1, nf2) = (self.quads[0].len(), self.quads[1].len(), fine[0].len(), fine[1].len());
                // along the second axis, then the first
                let mut half = vec![Complex64::new(0.0, 0.0); nc1 * nf2];
                for k1 in 0..nc1 {
                    for (k2, row) in mats[1].iter().enumerate() {
                        let v: Complex64 = row.iter().map(|(j, a)| state.uhat[k1 * nc2 + j] * dc[1][*j] * a).sum();
                        half[k1 * nf2 + k2] = v * df[1][k2].conj() * dc[0][k1];
                    }
                }
                let mut full = vec![Complex64::new(0.0, 0.0); nf1 * nf2];
                for (k1, row) in mats[0].iter().enumerate() {
                    for k2 in 0..nf2 {
                        let v: Complex64 = row.iter().map(|(j, a)| half[j * nf2 + k2] * a).sum();
                        full[k1 * nf2 + k2] = v * df[0][k1].conj();
                    }
                }
                full
            }
        };
        Ok(points
            .iter()
            .map(|p| {
                let mut acc = Complex64::new(0.0, 0.0);
                match self.d {
                    1 => {
                        for ((z, w), c) in fine[0].nodes.iter().zip(&fine[0].weights).zip(&refined) {
                            acc += (I * z * p[0]).exp() * w * c;
                        }
                    }
                    _ => {
                        let e2: Vec<Complex64> = fine[1]
                            .nodes
                            .iter()
                            .zip(&fine[1].weights)
                            .map(|(z, w)| (I * z * p[1]).exp() * w)
                            .collect();
                        let nf2 = fine[1].len();
                        for (k1, (z, w)) in fine[0].nodes.iter().zip(&fine[0].weights).enumerate() {
                            let e1 = (I * z * p[0]).exp() * w;
                            let row: Complex64 =
                                refined[k1 * nf2..(k1 + 1) * nf2].iter().zip(&e2).map(|(c, e)| c * e).sum();
                            acc += e1 * row;
                        }
                    }
                }
                acc * self.inv_scale
            })
            .collect())
    }
}
