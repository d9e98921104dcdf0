//! Convergence sweeps over step count, grid size or contour spacing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{final_error, reference_final, simulate, ExperimentConfig, ReferencePolicy, Simulation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepParam {
    Steps { values: Vec<usize> },
    /// Grid size, applied to every axis.
    M { values: Vec<usize> },
    /// Contour spacing on one axis; the reported value is the realized `h`.
    H { axis: usize, values: Vec<f64> },
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Steps { .. } => "steps",
            SweepParam::M { .. } => "M",
            SweepParam::H { .. } => "h",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepParam::Steps { values } | SweepParam::M { values } => values.len(),
            SweepParam::H { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn apply(&self, base: &ExperimentConfig, i: usize) -> Result<ExperimentConfig> {
        let mut c = base.clone();
        match self {
            SweepParam::Steps { values } => {
                c.steps = values[i];
                c.dt = None;
            }
            SweepParam::M { values } => c.m = vec![values[i]; c.d],
            SweepParam::H { axis, values } => {
                let k = c.contour.as_mut().ok_or_else(|| Error::Config("an h sweep needs contour knobs".into()))?;
                if *axis >= base.d {
                    return Err(Error::Config(format!("sweep axis {axis} out of range for d = {}", base.d)));
                }
                let mut h = match (&k.h, &k.ne) {
                    (Some(h), _) => h.clone(),
                    (None, Some(_)) => base.contour_configs()?.iter().map(|q| q.leg_spacing()).collect::<Result<Vec<_>>>()?,
                    (None, None) => vec![1.0; base.d],
                };
                h[*axis] = values[i];
                k.h = Some(h);
                k.ne = None;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub error: f64,
    pub observed_order: Option<f64>,
    pub wall_seconds: f64,
    pub steps_per_second: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    pub metadata: serde_json::Value,
    /// Final state of the most resolved point.
    #[serde(skip)]
    pub finest: Option<(f64, Vec<Complex64>)>,
    /// Reference final state when one was computed.
    #[serde(skip)]
    pub reference: Option<(f64, Vec<Complex64>)>,
}

pub const SWEEP_CSV_HEADER: &str = "param,E,observed_order,wall_seconds,steps_per_second";

impl SweepTable {
    /// One metadata comment line, the header, then one row per point.
    ///
    /// Without timing the last two columns are left empty, so serial runs of
    /// the same config produce identical bytes.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = format!("# {}\n{SWEEP_CSV_HEADER}\n", self.metadata);
        for r in &self.rows {
            let order = r.observed_order.map(|o| format!("{o:.6}")).unwrap_or_default();
            if with_timing {
                out.push_str(&format!(
                    "{},{:e},{order},{:.6},{:.3}\n",
                    r.param, r.error, r.wall_seconds, r.steps_per_second
                ));
            } else {
                out.push_str(&format!("{},{:e},{order},,\n", r.param, r.error));
            }
        }
        out
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.observed_order).collect()
    }
}

/// `log(E_{i-1}/E_i) / log(r_i/r_{i-1})` for resolutions `r` (larger is finer).
pub fn observed_orders(resolution: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|i| {
            (i > 0).then(|| (errors[i - 1] / errors[i]).ln() / (resolution[i] / resolution[i - 1]).ln())
        })
        .collect()
}

fn run_points(cfgs: &[ExperimentConfig], serial: bool) -> Vec<Result<Simulation>> {
    if serial || cfgs.len() < 2 {
        return cfgs.iter().map(simulate).collect();
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = cfgs.iter().map(|c| s.spawn(move || simulate(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Numerics("sweep worker panicked".into()))))
            .collect()
    })
}

/// Runs every point of the sweep and tabulates `E` with observed orders.
///
/// `E` is `Emax` over the recorded times for an analytic reference and
/// `E(T)` against the reference final state otherwise. Points run
/// concurrently unless `serial`; every point is itself deterministic.
pub fn convergence_sweep(base: &ExperimentConfig, param: &SweepParam, serial: bool) -> Result<SweepTable> {
    if param.is_empty() {
        return Err(Error::Config("empty sweep".into()));
    }
    if base.reference == ReferencePolicy::None {
        return Err(Error::Config("a sweep needs a reference policy".into()));
    }
    let cfgs = (0..param.len()).map(|i| param.apply(base, i)).collect::<Result<Vec<_>>>()?;
    for c in &cfgs {
        c.validate()?;
    }
    let (sims, reference) = if serial {
        (run_points(&cfgs, true), reference_final(base)?)
    } else {
        std::thread::scope(|s| {
            let r = s.spawn(|| reference_final(base));
            let sims = run_points(&cfgs, false);
            let r = r.join().unwrap_or_else(|_| Err(Error::Numerics("reference worker panicked".into())));
            r.map(|r| (sims, r))
        })?
    };
    let mut params = Vec::with_capacity(cfgs.len());
    let mut resolution = Vec::with_capacity(cfgs.len());
    let mut errors = Vec::with_capacity(cfgs.len());
    let mut timing = Vec::with_capacity(cfgs.len());
    let mut finals = Vec::with_capacity(cfgs.len());
    for (i, (c, sim)) in cfgs.iter().zip(sims).enumerate() {
        let sim = sim?;
        let e = match &reference {
            None => sim.rows.iter().map(|r| r.1).fold(0.0, f64::max),
            Some(r) => final_error(c, &sim, r)?,
        };
        let (p, res) = match param {
            SweepParam::Steps { values } => (values[i] as f64, values[i] as f64),
            SweepParam::M { values } => (values[i] as f64, values[i] as f64),
            SweepParam::H { axis, .. } => {
                let h = c.contour_configs()?[*axis].leg_spacing()?;
                (h, 1.0 / h)
            }
        };
        params.push(p);
        resolution.push(res);
        errors.push(e);
        timing.push((sim.wall_seconds, sim.steps_per_second));
        finals.push((sim.t, sim.u));
    }
    let orders = observed_orders(&resolution, &errors);
    let rows = (0..params.len())
        .map(|i| SweepRow {
            param: params[i],
            error: errors[i],
            observed_order: orders[i],
            wall_seconds: timing[i].0,
            steps_per_second: timing[i].1,
        })
        .collect();
    let finest_idx = (0..resolution.len()).max_by(|&a, &b| resolution[a].total_cmp(&resolution[b])).expect("nonempty");
    let finest = finals.into_iter().nth(finest_idx);
    Ok(SweepTable {
        parameter: param.name().to_string(),
        rows,
        metadata: json!({ "base": base.metadata()?, "sweep": param }),
        finest,
        reference,
    })
}
