//! Experiment configuration and single runs.

use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::snapshot::read_snapshot;
use super::{l2_error, ErrorReport, FREE_HALF_WIDTH, PERIODIC_HALF_WIDTH};
use crate::contour::{build_quadrature, physical_grid, quiver_radius, ContourConfig, GammaQuadrature};
use crate::freespace::FreeSolver;
use crate::periodic::{periodic_grid, AdamsScheme, PeriodicSolver, Snapshot};
use crate::problems::{
    ground_state, ionization_fraction, Potential, wavepacket, wavepacket_advected, FieldSpec, PotentialSpec, WavepacketParams,
};
use crate::xform::CMode;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Periodic,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// Product of 1D packets, one per axis.
    Wavepacket { sigma: f64, k0: f64 },
    /// Normalized ground state of the potential at `t = 0` from an `n`-point eigensolve.
    GroundState { n: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub field: FieldSpec,
    pub initial: InitialState,
    pub t_final: f64,
}

/// Free-space contour knobs; give exactly one of `ne` or `h` (one entry per axis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourKnobs {
    pub eps: f64,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default = "default_q")]
    pub q: usize,
    #[serde(default = "default_nr")]
    pub nr: usize,
    #[serde(default)]
    pub ne: Option<Vec<usize>>,
    #[serde(default)]
    pub h: Option<Vec<f64>>,
    #[serde(default)]
    pub cmode: CMode,
}

fn default_p() -> usize {
    8
}
fn default_q() -> usize {
    10
}
fn default_nr() -> usize {
    1
}
fn default_order() -> usize {
    8
}
fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Keep `u` every this many steps; 0 keeps none.
    #[serde(default)]
    pub snapshot_every: usize,
    /// Record `E(t)` every this many steps (analytic reference only).
    #[serde(default = "one")]
    pub error_every: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, snapshot_every: 0, error_every: 1 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferencePolicy {
    #[default]
    None,
    /// Closed-form wavepacket (free solver, `V = 0`).
    Analytic,
    /// The same configuration re-run with `steps` steps.
    SelfConverged { steps: usize },
    /// A snapshot file holding `u(·, T)` on the same grid.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub problem: ProblemSpec,
    pub solver: SolverKind,
    pub d: usize,
    /// Grid points per axis.
    pub m: Vec<usize>,
    /// Step count; ignored when `dt` is given.
    #[serde(default)]
    pub steps: usize,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub contour: Option<ContourKnobs>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub reference: ReferencePolicy,
}

impl ExperimentConfig {
    pub fn step_count(&self) -> Result<usize> {
        match self.dt {
            None => Ok(self.steps),
            Some(dt) => {
                if !(dt > 0.0) {
                    return Err(Error::Config(format!("dt = {dt} must be positive")));
                }
                let n = (self.problem.t_final / dt).round();
                if n < 1.0 || (n * dt - self.problem.t_final).abs() > 1e-9 * self.problem.t_final {
                    return Err(Error::Config(format!("dt = {dt} does not divide T = {}", self.problem.t_final)));
                }
                Ok(n as usize)
            }
        }
    }

    pub fn time_step(&self) -> Result<f64> {
        Ok(self.problem.t_final / self.step_count()? as f64)
    }

    pub fn half_width(&self) -> f64 {
        match self.solver {
            SolverKind::Periodic => PERIODIC_HALF_WIDTH,
            SolverKind::Free => FREE_HALF_WIDTH,
        }
    }

    pub fn grid_len(&self) -> usize {
        self.m.iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::Config(s));
        if !(self.d == 1 || self.d == 2) {
            return bad(format!("d = {} must be 1 or 2", self.d));
        }
        if self.m.len() != self.d {
            return bad(format!("m has {} entries for d = {}", self.m.len(), self.d));
        }
        if self.m.iter().any(|&m| m < 2 || m % 2 != 0) {
            return bad(format!("grid sizes {:?} must be even and at least 2", self.m));
        }
        if !(self.problem.t_final > 0.0) {
            return bad(format!("t_final = {} must be positive", self.problem.t_final));
        }
        if self.step_count()? == 0 {
            return bad("step count must be positive".into());
        }
        AdamsScheme::new(self.order)?;
        if let Some(dur) = self.problem.field.duration() {
            if dur < self.problem.t_final * (1.0 - 1e-12) {
                return bad(format!("field duration {dur} is shorter than t_final {}", self.problem.t_final));
            }
        }
        if let InitialState::Wavepacket { sigma, .. } = self.problem.initial {
            if !(sigma > 0.0) {
                return bad(format!("sigma = {sigma} must be positive"));
            }
        }
        match self.solver {
            SolverKind::Periodic => {
                if self.d == 2 && self.m[0] != self.m[1] {
                    return bad("the periodic solver needs a square grid".into());
                }
            }
            SolverKind::Free => {
                let k = self.contour.as_ref().ok_or_else(|| Error::Config("the free solver needs contour knobs".into()))?;
                match (&k.ne, &k.h) {
                    (Some(ne), None) if ne.len() == self.d => {}
                    (None, Some(h)) if h.len() == self.d => {}
                    _ => return bad(format!("give exactly one of ne or h with {} entries", self.d)),
                }
            }
        }
        match &self.reference {
            ReferencePolicy::Analytic => {
                let ok = self.solver == SolverKind::Free
                    && Potential::is_zero(&self.problem.potential)
                    && matches!(self.problem.initial, InitialState::Wavepacket { .. });
                if !ok {
                    return bad("an analytic reference needs the free solver, V = 0 and a wavepacket".into());
                }
            }
            ReferencePolicy::SelfConverged { steps } if *steps == 0 => {
                return bad("self-converged reference needs a positive step count".into());
            }
            _ => {}
        }
        Ok(())
    }

    /// Per-axis contour configurations (free solver).
    pub fn contour_configs(&self) -> Result<Vec<ContourConfig>> {
        let k = self.contour.as_ref().ok_or_else(|| Error::Config("the free solver needs contour knobs".into()))?;
        let phimax = quiver_radius(&self.problem.field, self.problem.t_final)?;
        let vnorm = self.problem.potential.l2_norm(self.d);
        (0..self.d)
            .map(|i| {
                let mut c = ContourConfig::new(k.eps, self.m[i], k.ne.as_ref().map_or(1, |v| v[i]));
                c.p = k.p;
                c.q = k.q;
                c.nr = k.nr;
                c.d = self.d;
                c.phimax = if i == 0 { phimax } else { 0.0 };
                c.vnorm = vnorm;
                if let Some(h) = &k.h {
                    c = c.with_spacing(h[i])?;
                }
                c.validate()?;
                Ok(c)
            })
            .collect()
    }

    /// Grid coordinates per axis.
    pub fn axes(&self) -> Vec<Vec<f64>> {
        self.m
            .iter()
            .map(|&m| match self.solver {
                SolverKind::Periodic => periodic_grid(m),
                SolverKind::Free => physical_grid(m),
            })
            .collect()
    }

    /// Everything needed to re-run: the config plus derived contour and step data.
    pub fn metadata(&self) -> Result<serde_json::Value> {
        let mut derived = json!({ "steps": self.step_count()?, "dt": self.time_step()? });
        if self.solver == SolverKind::Free {
            let quads = self.quadratures()?;
            derived["contours"] = quads
                .iter()
                .map(|q| {
                    json!({
                        "H": q.height, "K": q.cutoff, "h": q.spacing, "N": q.len(),
                        "ne": q.config.ne, "phimax": q.config.phimax, "vnorm": q.config.vnorm,
                    })
                })
                .collect();
        }
        Ok(json!({ "config": self, "derived": derived }))
    }

    pub(crate) fn quadratures(&self) -> Result<Vec<GammaQuadrature>> {
        self.contour_configs()?.iter().map(build_quadrature).collect()
    }
}

/// Outcome of one run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub t: f64,
    pub u: Vec<Complex64>,
    pub snapshots: Vec<Snapshot>,
    pub errors: Option<ErrorReport>,
    pub wall_seconds: f64,
    pub steps_per_second: f64,
    /// `1 - ∫_box |u(·, T)|² / ∫_box |u(·, 0)|²` (free solver only).
    pub ionization: Option<f64>,
    pub transform_counts: (usize, usize),
}

/// Raw output of one march.
#[derive(Debug, Clone)]
pub(crate) struct Simulation {
    pub t: f64,
    pub u: Vec<Complex64>,
    pub snapshots: Vec<Snapshot>,
    pub rows: Vec<(f64, f64)>,
    pub wall_seconds: f64,
    pub steps_per_second: f64,
    pub transform_counts: (usize, usize),
    pub initial_mass: f64,
}

pub(crate) fn initial_values(cfg: &ExperimentConfig, axes: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    match cfg.problem.initial {
        InitialState::Wavepacket { sigma, k0 } => Ok(packet_product(&WavepacketParams { sigma, k0 }, axes, 0.0, 0.0)),
        InitialState::GroundState { n } => Ok(ground_state(&cfg.problem.potential, cfg.d, n)?.sample(axes)),
    }
}

/// `Π_i u_wp(x_i, t)` with the first axis shifted by `φ`, row-major.
fn packet_product(p: &WavepacketParams, axes: &[Vec<f64>], t: f64, phi: f64) -> Vec<Complex64> {
    let first: Vec<Complex64> = axes[0].iter().map(|&x| wavepacket_advected(p, x, t, phi)).collect();
    match axes.len() {
        1 => first,
        _ => {
            let second: Vec<Complex64> = axes[1].iter().map(|&y| wavepacket(p, y, t)).collect();
            first.iter().flat_map(|a| second.iter().map(move |b| a * b)).collect()
        }
    }
}

pub(crate) fn simulate(cfg: &ExperimentConfig) -> Result<Simulation> {
    cfg.validate()?;
    let steps = cfg.step_count()?;
    let dt = cfg.time_step()?;
    let scheme = AdamsScheme::new(cfg.order)?;
    let axes = cfg.axes();
    let u0 = initial_values(cfg, &axes)?;
    let initial_mass = 1.0 - ionization_fraction(&u0, cfg.d);
    let analytic = match (cfg.reference.clone(), cfg.problem.initial) {
        (ReferencePolicy::Analytic, InitialState::Wavepacket { sigma, k0 }) => Some(WavepacketParams { sigma, k0 }),
        _ => None,
    };
    let hw = cfg.half_width();
    let every = cfg.output.snapshot_every;
    let err_every = cfg.output.error_every.max(1);
    let mut snapshots = Vec::new();
    let mut rows = Vec::new();
    let mut visit = |step: usize, t: f64, u: &[Complex64]| -> Result<()> {
        if every > 0 && step % every == 0 {
            snapshots.push(Snapshot { t, u: u.to_vec() });
        }
        if let Some(p) = &analytic {
            if step % err_every == 0 || step == steps {
                let r = packet_product(p, &axes, t, cfg.problem.field.phi(t)?);
                rows.push((t, l2_error(u, &r, hw, cfg.d)?));
            }
        }
        Ok(())
    };
    let startup = (cfg.order - 2).min(steps);
    let levels = cfg.order / 2;
    let field = cfg.problem.field.clone();
    let potential = cfg.problem.potential;
    let (t, u, wall, counts) = match cfg.solver {
        SolverKind::Periodic => {
            let solver = PeriodicSolver::new(cfg.d, cfg.m[0], &potential, field)?;
            let before = solver.fft_counts();
            let start = Instant::now();
            let mut st = solver.initial_state(u0)?;
            visit(0, 0.0, &st.u)?;
            for s in 0..steps {
                if s < startup {
                    solver.richardson_step(&mut st, dt, levels, cfg.order - 1)?;
                } else {
                    solver.step_adams(&mut st, &scheme, dt)?;
                }
                st.t = st.step as f64 * dt;
                visit(st.step, st.t, &st.u)?;
            }
            let wall = start.elapsed().as_secs_f64();
            let after = solver.fft_counts();
            (st.t, st.u, wall, (after.0 - before.0, after.1 - before.1))
        }
        SolverKind::Free => {
            let quads = cfg.quadratures()?;
            let cmode = cfg.contour.as_ref().map(|k| k.cmode).unwrap_or_default();
            let solver = FreeSolver::new(quads, cmode, &potential, field)?;
            let before = solver.transform_counts();
            let start = Instant::now();
            let mut st = solver.init(u0)?;
            visit(0, 0.0, &st.u)?;
            for s in 0..steps {
                if s < startup {
                    solver.richardson_step(&mut st, dt, levels, cfg.order - 1)?;
                } else {
                    solver.step_adams(&mut st, &scheme, dt)?;
                }
                st.t = st.step as f64 * dt;
                visit(st.step, st.t, &st.u)?;
            }
            let wall = start.elapsed().as_secs_f64();
            let after = solver.transform_counts();
            (st.t, st.u, wall, (after.0 - before.0, after.1 - before.1))
        }
    };
    Ok(Simulation {
        t,
        u,
        snapshots,
        rows,
        wall_seconds: wall,
        steps_per_second: steps as f64 / wall.max(1e-12),
        transform_counts: counts,
        initial_mass,
    })
}

/// Final state of the reference named by the policy, if it needs no run of
/// its own configuration.
pub(crate) fn reference_final(cfg: &ExperimentConfig) -> Result<Option<(f64, Vec<Complex64>)>> {
    match &cfg.reference {
        ReferencePolicy::None | ReferencePolicy::Analytic => Ok(None),
        ReferencePolicy::SelfConverged { steps } => {
            let mut r = cfg.clone();
            r.steps = *steps;
            r.dt = None;
            r.reference = ReferencePolicy::None;
            r.output.snapshot_every = 0;
            let sim = simulate(&r)?;
            Ok(Some((sim.t, sim.u)))
        }
        ReferencePolicy::File { path } => {
            let s = read_snapshot(path)?;
            if s.shape != cfg.m {
                return Err(Error::shape(format!("reference grid {:?}", cfg.m), format!("{:?}", s.shape)));
            }
            Ok(Some((s.t, s.data)))
        }
    }
}

pub(crate) fn final_error(
    cfg: &ExperimentConfig,
    sim: &Simulation,
    reference: &(f64, Vec<Complex64>),
) -> Result<f64> {
    let (t_ref, u_ref) = reference;
    if (t_ref - sim.t).abs() > 1e-9 * sim.t.abs().max(1.0) {
        return Err(Error::Config(format!("reference is at t = {t_ref}, run ended at t = {}", sim.t)));
    }
    l2_error(&sim.u, u_ref, cfg.half_width(), cfg.d)
}

/// Runs one configuration and measures it against its reference policy.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let sim = simulate(cfg)?;
    let metadata = cfg.metadata()?;
    let errors = match &cfg.reference {
        ReferencePolicy::None => None,
        ReferencePolicy::Analytic => {
            Some(ErrorReport::new(sim.rows.clone(), metadata, sim.wall_seconds, sim.steps_per_second))
        }
        _ => {
            let r = reference_final(cfg)?.expect("policy has a final state");
            let e = final_error(cfg, &sim, &r)?;
            Some(ErrorReport::new(vec![(sim.t, e)], metadata, sim.wall_seconds, sim.steps_per_second))
        }
    };
    let ionization = (cfg.solver == SolverKind::Free).then(|| 1.0 - (1.0 - ionization_fraction(&sim.u, cfg.d)) / sim.initial_mass);
    Ok(RunReport {
        config: cfg.clone(),
        t: sim.t,
        u: sim.u,
        snapshots: sim.snapshots,
        errors,
        wall_seconds: sim.wall_seconds,
        steps_per_second: sim.steps_per_second,
        ionization,
        transform_counts: sim.transform_counts,
    })
}
