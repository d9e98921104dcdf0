//! Named experiment presets and their on-disk artifacts.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{
    run_experiment, ContourKnobs, ExperimentConfig, InitialState, OutputSpec, ProblemSpec, ReferencePolicy,
    RunReport, SolverKind,
};
use super::snapshot::{write_snapshot, SnapshotFile};
use super::sweep::{convergence_sweep, SweepParam, SweepTable};
use crate::problems::{ionization_fraction, FieldSpec, PotentialSpec};
use crate::xform::CMode;
use crate::{Error, Result};

/// Largest step count (sweep points and references) at desk scale.
pub const DESK_MAX_STEPS: usize = 8000;
/// Largest grid per axis at desk scale, 1D and 2D.
pub const DESK_MAX_M: [usize; 2] = [512, 160];

#[derive(Debug, Clone)]
pub struct ExampleCase {
    pub label: String,
    pub config: ExperimentConfig,
    /// `None` runs the config once and records `E(t)`.
    pub sweep: Option<SweepParam>,
}

#[derive(Debug, Clone)]
pub struct Example {
    pub name: String,
    pub description: String,
    pub cases: Vec<ExampleCase>,
}

#[derive(Debug, Clone)]
pub struct ExampleOutput {
    pub label: String,
    pub table: Option<SweepTable>,
    pub report: Option<RunReport>,
    pub ionization: Option<f64>,
    pub files: Vec<PathBuf>,
}

pub fn example_names() -> &'static [&'static str] {
    &["example1", "example2", "example2a", "example2b", "example2c", "example2d", "example2e", "example3", "example4"]
}

/// Rejects configurations beyond desk scale.
pub fn check_desk_caps(cfg: &ExperimentConfig, sweep: Option<&SweepParam>) -> Result<()> {
    let mut steps = vec![cfg.step_count()?];
    if let ReferencePolicy::SelfConverged { steps: s } = cfg.reference {
        steps.push(s);
    }
    let mut ms = cfg.m.clone();
    match sweep {
        Some(SweepParam::Steps { values }) => steps.extend(values),
        Some(SweepParam::M { values }) => ms.extend(values),
        _ => {}
    }
    if let Some(&s) = steps.iter().find(|&&s| s > DESK_MAX_STEPS) {
        return Err(Error::Config(format!("{s} steps exceeds the desk cap {DESK_MAX_STEPS} (use full scale)")));
    }
    let cap = DESK_MAX_M[(cfg.d.clamp(1, 2)) - 1];
    if let Some(&m) = ms.iter().find(|&&m| m > cap) {
        return Err(Error::Config(format!("M = {m} exceeds the desk cap {cap} in {}D (use full scale)", cfg.d)));
    }
    Ok(())
}

fn doublings(from: usize, count: usize) -> Vec<usize> {
    (0..count).map(|k| from << k).collect()
}

fn free_packet(sigma: f64, field: FieldSpec, t_final: f64, m: usize, knobs: ContourKnobs, steps: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: String::new(),
        problem: ProblemSpec {
            potential: PotentialSpec::Zero,
            field,
            initial: InitialState::Wavepacket { sigma, k0: 0.0 },
            t_final,
        },
        solver: SolverKind::Free,
        d: 1,
        m: vec![m],
        steps,
        dt: None,
        order: 8,
        contour: Some(knobs),
        output: OutputSpec::default(),
        reference: ReferencePolicy::Analytic,
    }
}

fn knobs(eps: f64, h: Vec<f64>, q: usize, nr: usize, cmode: CMode) -> ContourKnobs {
    ContourKnobs { eps, p: 8, q, nr, ne: None, h: Some(h), cmode }
}

const EX2_T: f64 = 0.1;
const EX2_OMEGA: f64 = 500.0;
const EX2_STEPS: usize = 100;

fn example1(full: bool) -> Example {
    let steps = if full { doublings(200, 8) } else { doublings(200, 5) };
    let reference = if full { 51_200 } else { DESK_MAX_STEPS };
    let cases = [15.0, 30.0, 45.0]
        .iter()
        .map(|&c| ExampleCase {
            label: format!("c{c}"),
            config: ExperimentConfig {
                name: format!("example1-c{c}"),
                problem: ProblemSpec {
                    potential: PotentialSpec::MovingPeriodicWell { v0: 300.0, beta: 0.2, c },
                    field: FieldSpec::Zero,
                    initial: InitialState::GroundState { n: 512 },
                    t_final: 2.0 * PI / 15.0,
                },
                solver: SolverKind::Periodic,
                d: 1,
                m: vec![256],
                steps: steps[0],
                dt: None,
                order: 8,
                contour: None,
                output: OutputSpec::default(),
                reference: ReferencePolicy::SelfConverged { steps: reference },
            },
            sweep: Some(SweepParam::Steps { values: steps.clone() }),
        })
        .collect();
    Example {
        name: "example1".into(),
        description: "moving periodic Gaussian well, E(T) against dt for c = 15, 30, 45".into(),
        cases,
    }
}

/// Field amplitudes of the quiver-radius study and the spacing that
/// converges each of them.
const EX2_FIELDS: [(f64, f64); 4] = [(0.0, 0.4), (500.0, 0.2), (1500.0, 0.1), (3500.0, 0.05)];
const EX2_SIGMAS: [f64; 3] = [0.1, 0.05, 0.025];

fn example2a() -> Example {
    let cases = EX2_FIELDS
        .iter()
        .map(|&(a0, h)| {
            let field = if a0 == 0.0 { FieldSpec::Zero } else { FieldSpec::pulse(a0, EX2_OMEGA, EX2_T) };
            let mut c = free_packet(0.1, field, EX2_T, 16, knobs(1e-14, vec![h], 10, 1, CMode::Auto), EX2_STEPS);
            c.name = format!("example2a-A{a0}");
            ExampleCase {
                label: format!("A{a0}"),
                config: c,
                sweep: Some(SweepParam::M { values: (2..=10).map(|k| 8 * k).collect() }),
            }
        })
        .collect();
    Example { name: "example2a".into(), description: "Emax against M for A0 = 0, 500, 1500, 3500".into(), cases }
}

fn example2b() -> Example {
    let hs: Vec<f64> = (0..10).map(|k| 2.0 * 0.5f64.powf(k as f64 / 2.0)).collect();
    let cases = EX2_FIELDS
        .iter()
        .map(|&(a0, _)| {
            let field = if a0 == 0.0 { FieldSpec::Zero } else { FieldSpec::pulse(a0, EX2_OMEGA, EX2_T) };
            let mut c = free_packet(0.1, field, EX2_T, 64, knobs(1e-14, vec![1.0], 10, 1, CMode::Auto), EX2_STEPS);
            c.name = format!("example2b-A{a0}");
            ExampleCase {
                label: format!("A{a0}"),
                config: c,
                sweep: Some(SweepParam::H { axis: 0, values: hs.clone() }),
            }
        })
        .collect();
    Example { name: "example2b".into(), description: "Emax against h for A0 = 0, 500, 1500, 3500".into(), cases }
}

fn example2c() -> Example {
    let cases = EX2_SIGMAS
        .iter()
        .map(|&sigma| {
            let mut c = free_packet(sigma, FieldSpec::Zero, EX2_T, 16, knobs(1e-14, vec![0.4], 10, 1, CMode::Auto), EX2_STEPS);
            c.name = format!("example2c-sigma{sigma}");
            ExampleCase {
                label: format!("sigma{sigma}"),
                config: c,
                sweep: Some(SweepParam::M { values: (1..=12).map(|k| 16 * k).collect() }),
            }
        })
        .collect();
    Example { name: "example2c".into(), description: "Emax against M for sigma = 0.1, 0.05, 0.025".into(), cases }
}

fn example2d() -> Example {
    let hs: Vec<f64> = (0..8).map(|k| 2.0 * 0.5f64.powf(k as f64 / 2.0)).collect();
    let cases = EX2_SIGMAS
        .iter()
        .map(|&sigma| {
            let mut c = free_packet(sigma, FieldSpec::Zero, EX2_T, 192, knobs(1e-14, vec![1.0], 10, 1, CMode::Auto), EX2_STEPS);
            c.name = format!("example2d-sigma{sigma}");
            ExampleCase {
                label: format!("sigma{sigma}"),
                config: c,
                sweep: Some(SweepParam::H { axis: 0, values: hs.clone() }),
            }
        })
        .collect();
    Example { name: "example2d".into(), description: "Emax against h for sigma = 0.1, 0.05, 0.025".into(), cases }
}

/// Long-time run: `E(t)` for increasing refinement depth.
fn example2e(full: bool) -> Example {
    let (t_final, depths, steps) = if full { (1000.0, 1..=5, 100_000) } else { (100.0, 1..=3, 5000) };
    let cases = depths
        .map(|nr| {
            let field = FieldSpec::pulse(1.0, 1.0, t_final);
            let mut c = free_packet(0.1, field, t_final, 64, knobs(1e-14, vec![0.15], 16, nr, CMode::Auto), steps);
            c.name = format!("example2e-nr{nr}");
            ExampleCase { label: format!("nr{nr}"), config: c, sweep: None }
        })
        .collect();
    Example { name: "example2e".into(), description: "E(t) over a long pulse for increasing nr".into(), cases }
}

/// Ionization from a 1D Gaussian well; `omega` selects the pulse frequency.
pub fn example3_config(omega: f64, h: f64, eps: f64, steps: usize, reference: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: format!("example3-omega{omega}"),
        problem: ProblemSpec {
            potential: PotentialSpec::GaussianWell { v0: 1400.0, beta: 0.1 },
            field: FieldSpec::pulse(100.0, omega, 0.5),
            initial: InitialState::GroundState { n: 512 },
            t_final: 0.5,
        },
        solver: SolverKind::Free,
        d: 1,
        m: vec![100],
        steps,
        dt: None,
        order: 8,
        contour: Some(knobs(eps, vec![h], 10, 1, CMode::Direct)),
        output: OutputSpec::default(),
        reference: ReferencePolicy::SelfConverged { steps: reference },
    }
}

/// The 2D analogue, field along the first axis.
pub fn example4_config(omega: f64, h: [f64; 2], eps: f64, steps: usize, reference: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: format!("example4-omega{omega}"),
        problem: ProblemSpec {
            potential: PotentialSpec::GaussianWell { v0: 1400.0, beta: 0.1 },
            field: FieldSpec::pulse(100.0, omega, 0.5),
            initial: InitialState::GroundState { n: 512 },
            t_final: 0.5,
        },
        solver: SolverKind::Free,
        d: 2,
        m: vec![100, 100],
        steps,
        dt: None,
        order: 8,
        contour: Some(knobs(eps, h.to_vec(), 10, 1, CMode::Direct)),
        output: OutputSpec::default(),
        reference: ReferencePolicy::SelfConverged { steps: reference },
    }
}

fn example3(full: bool) -> Example {
    let (steps, reference) = if full { (doublings(1000, 7), 128_000) } else { (doublings(1000, 3), DESK_MAX_STEPS) };
    let cases = [50.0, 100.0, 200.0]
        .iter()
        .map(|&omega| ExampleCase {
            label: format!("omega{omega}"),
            config: example3_config(omega, 0.5, 1e-10, steps[0], reference),
            sweep: Some(SweepParam::Steps { values: steps.clone() }),
        })
        .collect();
    Example {
        name: "example3".into(),
        description: "1D ionization, E(T) against dt and ionization fraction for omega = 50, 100, 200".into(),
        cases,
    }
}

fn example4(full: bool) -> Example {
    let (omegas, steps, reference): (&[f64], _, _) = if full {
        (&[50.0, 100.0, 200.0], doublings(1000, 5), 32_000)
    } else {
        (&[100.0], doublings(1000, 3), DESK_MAX_STEPS)
    };
    let cases = omegas
        .iter()
        .map(|&omega| ExampleCase {
            label: format!("omega{omega}"),
            config: example4_config(omega, [1.4, 1.6], 1e-5, steps[0], reference),
            sweep: Some(SweepParam::Steps { values: steps.clone() }),
        })
        .collect();
    Example {
        name: "example4".into(),
        description: "2D ionization at eps = 1e-5, E(T) against dt and ionization fraction".into(),
        cases,
    }
}

/// Preset by name; `full` selects the long step sequences instead of desk scale.
pub fn preset(name: &str, full: bool) -> Result<Example> {
    let ex = match name {
        "example1" => example1(full),
        "example2a" => example2a(),
        "example2b" => example2b(),
        "example2c" => example2c(),
        "example2d" => example2d(),
        "example2e" => example2e(full),
        "example2" => {
            let mut cases = Vec::new();
            for part in [example2a(), example2b(), example2c(), example2d()] {
                let tag = part.name.trim_start_matches("example2").to_string();
                cases.extend(part.cases.into_iter().map(|mut c| {
                    c.label = format!("{tag}-{}", c.label);
                    c
                }));
            }
            Example { name: "example2".into(), description: "contour truncation and quadrature convergence".into(), cases }
        }
        "example3" => example3(full),
        "example4" => example4(full),
        other => {
            return Err(Error::Config(format!("unknown example '{other}' (known: {})", example_names().join(", "))));
        }
    };
    if !full {
        for c in &ex.cases {
            check_desk_caps(&c.config, c.sweep.as_ref())?;
        }
    }
    Ok(ex)
}

/// Runs every case of a preset, writing CSVs and final-state snapshots to `out`.
pub fn run_example(name: &str, out: Option<&Path>, serial: bool, full: bool) -> Result<Vec<ExampleOutput>> {
    let ex = preset(name, full)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
    }
    let mut outputs = Vec::new();
    let mut summary = String::from("case,ionization,steps_per_second\n");
    for case in &ex.cases {
        let stem = format!("{}_{}", ex.name, case.label);
        let mut files = Vec::new();
        let (table, report, state) = match &case.sweep {
            Some(sweep) => {
                let table = convergence_sweep(&case.config, sweep, serial)?;
                let state = table.reference.clone().or_else(|| table.finest.clone());
                if let Some(dir) = out {
                    let p = dir.join(format!("{stem}.csv"));
                    fs::write(&p, table.to_csv(!serial))?;
                    files.push(p);
                }
                (Some(table), None, state)
            }
            None => {
                let report = run_experiment(&case.config)?;
                if let (Some(dir), Some(errs)) = (out, &report.errors) {
                    let p = dir.join(format!("{stem}.csv"));
                    fs::write(&p, errs.to_csv(!serial))?;
                    files.push(p);
                }
                let state = Some((report.t, report.u.clone()));
                (None, Some(report), state)
            }
        };
        let ionization = match (&state, case.config.solver) {
            (Some((_, u)), SolverKind::Free) => Some(ionization_fraction(u, case.config.d)),
            _ => None,
        };
        if let (Some(dir), Some((t, u))) = (out, &state) {
            let p = dir.join(format!("{stem}_final.snap"));
            write_snapshot(&p, &SnapshotFile { t: *t, shape: case.config.m.clone(), data: u.clone() })?;
            files.push(p);
        }
        let sps = table
            .as_ref()
            .and_then(|t| t.rows.last().map(|r| r.steps_per_second))
            .or(report.as_ref().map(|r| r.steps_per_second))
            .unwrap_or(0.0);
        let sps = if serial { String::new() } else { format!("{sps:.3}") };
        summary.push_str(&format!(
            "{},{},{sps}\n",
            case.label,
            ionization.map(|v| format!("{v:.10}")).unwrap_or_default()
        ));
        outputs.push(ExampleOutput { label: case.label.clone(), table, report, ionization, files });
    }
    if let Some(dir) = out {
        let p = dir.join(format!("{}_summary.csv", ex.name));
        fs::write(&p, summary)?;
        if let Some(first) = outputs.first_mut() {
            first.files.push(p);
        }
    }
    Ok(outputs)
}
