//! Error metrics, experiment configs, convergence sweeps, presets and the
//! snapshot format.

mod config;
mod presets;
mod snapshot;
mod sweep;
mod transform_check;

pub use config::{
    run_experiment, ContourKnobs, ExperimentConfig, InitialState, OutputSpec, ProblemSpec, ReferencePolicy,
    RunReport, SolverKind,
};
pub use presets::{
    check_desk_caps, example3_config, example4_config, example_names, preset, run_example, Example, ExampleCase,
    ExampleOutput, DESK_MAX_M, DESK_MAX_STEPS,
};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotFile, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use sweep::{convergence_sweep, observed_orders, SweepParam, SweepRow, SweepTable, SWEEP_CSV_HEADER};
pub use transform_check::{transform_check, TransformCheck, TransformCheckRow};

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

/// Half-width of the periodic cell `[-π, π]^d`.
pub const PERIODIC_HALF_WIDTH: f64 = std::f64::consts::PI;
/// Half-width of the free-space box `[-1, 1]^d`.
pub const FREE_HALF_WIDTH: f64 = 1.0;

/// Discrete `L²` distance with the left-endpoint rule on `M^d` points of
/// `[-L, L)^d`.
pub fn l2_error(u: &[Complex64], u_ref: &[Complex64], half_width: f64, d: usize) -> Result<f64> {
    if u.len() != u_ref.len() {
        return Err(Error::shape(format!("{} grid values", u_ref.len()), u.len()));
    }
    let m = grid_side(u.len(), d)?;
    let cell = (2.0 * half_width / m as f64).powi(d as i32);
    let s: f64 = u.iter().zip(u_ref).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((s * cell).sqrt())
}

/// Side length `M` of a square `d`-dimensional grid with `len` points.
pub fn grid_side(len: usize, d: usize) -> Result<usize> {
    let m = match d {
        1 => len,
        2 => (len as f64).sqrt().round() as usize,
        _ => return Err(Error::Config(format!("d = {d} must be 1 or 2"))),
    };
    if m.pow(d as u32) != len || m == 0 {
        return Err(Error::shape(format!("a square grid in {d} dimensions"), len));
    }
    Ok(m)
}

/// `E(t)` history against a reference, with the metadata needed to re-run it.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub rows: Vec<(f64, f64)>,
    pub emax: f64,
    pub metadata: serde_json::Value,
    pub wall_seconds: f64,
    pub steps_per_second: f64,
}

impl ErrorReport {
    pub fn new(rows: Vec<(f64, f64)>, metadata: serde_json::Value, wall_seconds: f64, steps_per_second: f64) -> Self {
        let emax = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        ErrorReport { rows, emax, metadata, wall_seconds, steps_per_second }
    }

    /// Metadata comment line, then `t,E` rows.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut meta = self.metadata.clone();
        if with_timing {
            meta["wall_seconds"] = self.wall_seconds.into();
            meta["steps_per_second"] = self.steps_per_second.into();
        }
        let mut out = format!("# {}\n# Emax = {:e}\nt,E\n", meta, self.emax);
        for (t, e) in &self.rows {
            out.push_str(&format!("{t:e},{e:e}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests;
