//! Periodic marching on `[-π, π]^d`, `d = 1, 2`.
//!
//! With `G_l(k) = e^{-i|k|² lΔt + i k₁(φ(t) - φ(t - lΔt))}` one step is
//!
//! ```text
//! W   = G_1 û(t-Δt) - iΔt Σ_{l≥1} μ_l G_l (V̂u)(t-lΔt)
//! u   = IFFT(W) / (1 + iμ₀ΔtV(t))
//! û   = W - iμ₀Δt (V̂u)(t)
//! ```
//!
//! with `û = FFT(u)/M^d`. The field acts along the first axis.

mod fft;

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

pub use fft::FftNd;

use crate::contour::gauss_legendre_on;
use crate::problems::{sample_potential, FieldSpec, Potential};
use crate::{Error, Result, I};

/// Coefficients of the eighth-order implicit Adams rule.
pub const ADAMS8: [f64; 8] = [
    5257.0 / 17280.0,
    139849.0 / 120960.0,
    -4511.0 / 4480.0,
    123133.0 / 120960.0,
    -88547.0 / 120960.0,
    1537.0 / 4480.0,
    -11351.0 / 120960.0,
    275.0 / 24192.0,
];

/// Smallest admissible `|1 + iμ₀ΔtV|`.
pub const RESONANCE_FLOOR: f64 = 1e-14;

/// `μ_j = (1/Δt) ∫_{t-Δt}^{t} ℓ_j(s) ds` for the Lagrange basis on `t - jΔt`, `j < n`.
pub fn adams_coefficients(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Config("Adams order must be positive".into()));
    }
    let (x, w) = gauss_legendre_on(n.max(1), -1.0, 0.0)?;
    Ok((0..n)
        .map(|j| {
            x.iter()
                .zip(&w)
                .map(|(s, wk)| {
                    let mut p = 1.0;
                    for l in (0..n).filter(|&l| l != j) {
                        p *= (s + l as f64) / (l as f64 - j as f64);
                    }
                    p * wk
                })
                .sum()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamsScheme {
    pub n: usize,
    pub mu: Vec<f64>,
}

impl AdamsScheme {
    /// Order `n ∈ {2, 4, 6, 8}`.
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=8).contains(&n) || n % 2 != 0 {
            return Err(Error::Config(format!("Adams order {n} must be one of 2, 4, 6, 8")));
        }
        let mu = if n == 8 { ADAMS8.to_vec() } else { adams_coefficients(n)? };
        Ok(AdamsScheme { n, mu })
    }

    pub fn trapezoidal() -> Self {
        AdamsScheme { n: 2, mu: vec![0.5, 0.5] }
    }
}

/// Iterated Richardson tableau on trapezoidal results with `1, 2, 4, ...` substeps.
pub fn richardson_extrapolate(levels: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut row: Vec<Vec<Complex64>> = levels.to_vec();
    let mut m = 0;
    while row.len() > 1 {
        let f = 4f64.powi(m + 1);
        row = row
            .windows(2)
            .map(|p| p[0].iter().zip(&p[1]).map(|(lo, hi)| (hi * f - lo) / (f - 1.0)).collect())
            .collect();
        m += 1;
    }
    row.pop().unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct HistoryEntry {
    pub t: f64,
    pub phi: f64,
    pub vhat: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct PeriodicState {
    pub t: f64,
    pub step: usize,
    /// `φ(t)`
    pub phi: f64,
    pub u: Vec<Complex64>,
    pub uhat: Vec<Complex64>,
    /// `(V̂u)` at `t, t-Δt, ...`, most recent first.
    pub history: VecDeque<HistoryEntry>,
}

/// Multipliers `e^{-i|k|² lΔt}` for `l = 1..=7`, plus `e^{-i|k|²Δt} - 1`.
#[derive(Debug)]
struct Dispersion {
    g: Vec<Vec<Complex64>>,
    g1m1: Vec<Complex64>,
}

type DispersionCache = Mutex<HashMap<u64, Arc<Dispersion>>>;

pub struct PeriodicSolver<'a> {
    pub d: usize,
    pub m: usize,
    potential: &'a dyn Potential,
    field: FieldSpec,
    fft: FftNd,
    axis: Vec<f64>,
    kaxis: Vec<f64>,
    ksq: Vec<f64>,
    static_v: Option<Vec<f64>>,
    dispersion: DispersionCache,
}

impl std::fmt::Debug for PeriodicSolver<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicSolver").field("d", &self.d).field("m", &self.m).finish_non_exhaustive()
    }
}

/// `e^{iθ} - 1` without cancellation.
pub fn phase_minus_one(theta: f64) -> Complex64 {
    let h = (0.5 * theta).sin();
    Complex64::new(-2.0 * h * h, theta.sin())
}

/// `x_j = -π + 2πj/M`
pub fn periodic_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / m as f64).collect()
}

/// Wavenumbers in FFT order.
pub fn wavenumbers(m: usize) -> Vec<f64> {
    (0..m).map(|i| if i < m / 2 { i as f64 } else { i as f64 - m as f64 }).collect()
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub state: PeriodicState,
    pub snapshots: Vec<Snapshot>,
    /// `(t, ‖u‖₂)` after every step, starting at `t = 0`.
    pub norms: Vec<(f64, f64)>,
    /// FFT `(forward, inverse)` counts over the whole run.
    pub fft_counts: (usize, usize),
}

impl<'a> PeriodicSolver<'a> {
    pub fn new(d: usize, m: usize, potential: &'a dyn Potential, field: FieldSpec) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return Err(Error::Config(format!("dimension {d} not supported")));
        }
        if m < 2 || m % 2 != 0 {
            return Err(Error::Config(format!("grid size {m} must be even and at least 2")));
        }
        let axis = periodic_grid(m);
        let kaxis = wavenumbers(m);
        let ksq = match d {
            1 => kaxis.iter().map(|k| k * k).collect(),
            _ => kaxis.iter().flat_map(|a| kaxis.iter().map(move |b| a * a + b * b)).collect(),
        };
        let mut s = PeriodicSolver {
            d,
            m,
            potential,
            field,
            fft: FftNd::new(d, m),
            axis,
            kaxis,
            ksq,
            static_v: None,
            dispersion: Mutex::new(HashMap::new()),
        };
        if potential.is_static() {
            s.static_v = Some(s.sample_v(0.0));
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.fft.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fft.is_empty()
    }

    pub fn grid(&self) -> &[f64] {
        &self.axis
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn fft_counts(&self) -> (usize, usize) {
        self.fft.counts()
    }

    /// Discrete `‖u‖₂` with cell volume `(2π/M)^d`.
    pub fn norm(&self, u: &[Complex64]) -> f64 {
        let cell = (2.0 * std::f64::consts::PI / self.m as f64).powi(self.d as i32);
        (u.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell).sqrt()
    }

    fn sample_v(&self, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        let axes: Vec<&[f64]> = vec![&self.axis; self.d];
        sample_potential(self.potential, &axes, t, &mut v);
        v
    }

    fn potential_at(&self, t: f64) -> std::borrow::Cow<'_, [f64]> {
        match &self.static_v {
            Some(v) => std::borrow::Cow::Borrowed(v),
            None => std::borrow::Cow::Owned(self.sample_v(t)),
        }
    }

    /// `FFT(V u)/M^d`
    fn transform_vu(&self, v: &[f64], u: &[Complex64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u.iter().zip(v).map(|(a, b)| a * b).collect();
        self.fft.forward(&mut buf);
        let s = 1.0 / self.len() as f64;
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }

    fn dispersion(&self, dt: f64) -> Arc<Dispersion> {
        let mut cache = self.dispersion.lock().expect("dispersion cache");
        cache
            .entry(dt.to_bits())
            .or_insert_with(|| {
                Arc::new(Dispersion {
                    g: (1..=7)
                        .map(|l| self.ksq.iter().map(|k| Complex64::from_polar(1.0, -k * l as f64 * dt)).collect())
                        .collect(),
                    g1m1: self.ksq.iter().map(|k| phase_minus_one(-k * dt)).collect(),
                })
            })
            .clone()
    }

    /// State at `t = 0` with one history entry.
    pub fn initial_state(&self, u0: Vec<Complex64>) -> Result<PeriodicState> {
        self.state_at(0.0, 0, 0.0, u0)
    }

    fn state_at(&self, t: f64, step: usize, phi: f64, u: Vec<Complex64>) -> Result<PeriodicState> {
        if u.len() != self.len() {
            return Err(Error::shape(self.len(), u.len()));
        }
        let mut uhat = u.clone();
        self.fft.forward(&mut uhat);
        let s = 1.0 / self.len() as f64;
        uhat.iter_mut().for_each(|z| *z *= s);
        let vhat = self.transform_vu(&self.potential_at(t), &u);
        let mut history = VecDeque::new();
        history.push_front(HistoryEntry { t, phi, vhat });
        Ok(PeriodicState { t, step, phi, u, uhat, history })
    }

    /// One trapezoidal step.
    pub fn step_trapezoidal(&self, state: &mut PeriodicState, dt: f64) -> Result<()> {
        self.step_adams(state, &AdamsScheme::trapezoidal(), dt)
    }

    /// One implicit Adams step; needs `n - 1` history entries spaced by `dt`.
    pub fn step_adams(&self, state: &mut PeriodicState, scheme: &AdamsScheme, dt: f64) -> Result<()> {
        let n = scheme.n;
        if state.history.len() < n - 1 {
            return Err(Error::InsufficientHistory { have: state.history.len(), need: n - 1 });
        }
        let tol = 1e-9 * dt;
        for (l, h) in state.history.iter().take(n - 1).enumerate() {
            if (h.t - (state.t - l as f64 * dt)).abs() > tol {
                return Err(Error::Config(format!(
                    "history entry {l} at t = {} does not match step {dt} from t = {}",
                    h.t, state.t
                )));
            }
        }
        let t_new = state.t + dt;
        let phi_new = self.field.phi_step(state.t, state.phi, t_new)?;
        let disp = self.dispersion(dt);
        let len = self.len();
        let m = self.m;

        // e^{ik₁Δφ_l} along the first axis, and e^{ik₁Δφ_1} - 1
        let shifts: Option<(Vec<Vec<Complex64>>, Vec<Complex64>)> = (!self.field.is_zero()).then(|| {
            let full = (1..n)
                .map(|l| {
                    let dphi = phi_new - state.history[l - 1].phi;
                    self.kaxis.iter().map(|k| Complex64::from_polar(1.0, k * dphi)).collect()
                })
                .collect();
            let dphi = phi_new - state.phi;
            (full, self.kaxis.iter().map(|k| phase_minus_one(k * dphi)).collect())
        });
        let first_axis = |idx: usize| if self.d == 1 { idx } else { idx / m };

        let mut w = vec![Complex64::new(0.0, 0.0); len];
        for (idx, wk) in w.iter_mut().enumerate() {
            let g = |l: usize| -> Complex64 {
                let base = disp.g[l - 1][idx];
                match &shifts {
                    Some((s, _)) => base * s[l - 1][first_axis(idx)],
                    None => base,
                }
            };
            // G₁ - 1 kept separately so repeated products do not drift |û|
            let d1 = disp.g1m1[idx];
            let g1m1 = match &shifts {
                Some((_, s1)) => {
                    let e = s1[first_axis(idx)];
                    d1 + e + d1 * e
                }
                None => d1,
            };
            let uh = state.uhat[idx];
            let mut acc = uh + g1m1 * uh;
            for l in 1..n {
                acc -= I * (dt * scheme.mu[l]) * g(l) * state.history[l - 1].vhat[idx];
            }
            *wk = acc;
        }

        let mut u = w.clone();
        self.fft.inverse(&mut u);
        let v = self.potential_at(t_new);
        let c0 = I * (scheme.mu[0] * dt);
        for (j, (uj, vj)) in u.iter_mut().zip(v.iter()).enumerate() {
            let den = 1.0 + c0 * vj;
            if den.norm() < RESONANCE_FLOOR {
                return Err(Error::Resonance { index: j, magnitude: den.norm() });
            }
            *uj /= den;
        }
        let vhat = self.transform_vu(&v, &u);
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

    /// One Richardson-extrapolated step of order `2·levels` built from
    /// trapezoidal runs with `1, 2, ..., 2^{levels-1}` substeps; the history
    /// entry for the new time is regenerated from the extrapolated grid and
    /// at most `keep` entries are retained.
    pub fn richardson_step(&self, state: &mut PeriodicState, dt: f64, levels: usize, keep: usize) -> Result<()> {
        let base = self.state_at(state.t, state.step, state.phi, state.u.clone())?;
        let mut results = Vec::with_capacity(levels);
        let mut phi_end = state.phi;
        for i in 0..levels.max(1) {
            let sub = 1usize << i;
            let h = dt / sub as f64;
            let mut s = base.clone();
            for _ in 0..sub {
                self.step_trapezoidal(&mut s, h)?;
            }
            phi_end = s.phi;
            results.push(s.u);
        }
        let u = richardson_extrapolate(&results);
        let t_new = state.t + dt;
        let fresh = self.state_at(t_new, state.step + 1, phi_end, u)?;
        let mut history = std::mem::take(&mut state.history);
        history.push_front(fresh.history[0].clone());
        history.truncate(keep.max(1));
        *state = PeriodicState { history, ..fresh };
        Ok(())
    }

    /// Steps `1..=n-2` by Richardson extrapolation of matching order.
    pub fn richardson_startup(&self, state: &mut PeriodicState, scheme: &AdamsScheme, dt: f64) -> Result<()> {
        for _ in 0..scheme.n.saturating_sub(2) {
            self.richardson_step(state, dt, scheme.n / 2, scheme.n - 1)?;
        }
        Ok(())
    }

    /// Startup plus marching for `steps` steps of size `dt`.
    pub fn run(
        &self,
        u0: Vec<Complex64>,
        scheme: &AdamsScheme,
        dt: f64,
        steps: usize,
        snapshot_every: Option<usize>,
    ) -> Result<Trajectory> {
        let before = self.fft.counts();
        let mut state = self.initial_state(u0)?;
        let mut snapshots = Vec::new();
        let mut norms = vec![(0.0, self.norm(&state.u))];
        let record = |state: &PeriodicState, snapshots: &mut Vec<Snapshot>, norms: &mut Vec<(f64, f64)>| {
            norms.push((state.t, self.norm(&state.u)));
            if let Some(k) = snapshot_every {
                if k > 0 && state.step % k == 0 {
                    snapshots.push(Snapshot { t: state.t, u: state.u.clone() });
                }
            }
        };
        if snapshot_every.is_some_and(|k| k > 0) {
            snapshots.push(Snapshot { t: 0.0, u: state.u.clone() });
        }
        let startup = scheme.n.saturating_sub(2).min(steps);
        for _ in 0..startup {
            self.richardson_step(&mut state, dt, scheme.n / 2, scheme.n - 1)?;
            state.t = state.step as f64 * dt;
            record(&state, &mut snapshots, &mut norms);
        }
        for _ in startup..steps {
            self.step_adams(&mut state, scheme, dt)?;
            state.t = state.step as f64 * dt;
            record(&state, &mut snapshots, &mut norms);
        }
        let after = self.fft.counts();
        Ok(Trajectory { state, snapshots, norms, fft_counts: (after.0 - before.0, after.1 - before.1) })
    }
}
