use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde_json::json;
use tdse_core::contour::{alpert_rule, build_quadrature, select_h, ContourConfig};
use tdse_core::harness::{
    convergence_sweep, run_example, run_experiment, transform_check, write_snapshot, ExperimentConfig, SnapshotFile,
    SolverKind, SweepParam, TransformCheck,
};

use crate::{Cli, Command, ConvergenceArgs, DumpArgs, ExampleArgs, RunArgs, TransformTestArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tdse_core::Error),
    #[error("config {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> u8 {
        use tdse_core::Error as E;
        match self {
            CliError::Json { .. } | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::Config(_) | E::OutOfRange { .. } | E::Shape { .. } => 2,
                E::Unattainable { .. }
                | E::Resonance { .. }
                | E::Support { .. }
                | E::InsufficientHistory { .. }
                | E::Numerics(_) => 3,
                E::Io(_) => 4,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cli: Cli) -> Result<ExitCode> {
    let Cli { config, serial, out, command } = cli;
    match command {
        Command::RunPeriodic(a) => run(config, out, serial, SolverKind::Periodic, a),
        Command::RunFree(a) => run(config, out, serial, SolverKind::Free, a),
        Command::Convergence(a) => convergence(config, out, serial, a),
        Command::TransformTest(a) => transform_test(out, a),
        Command::Example(a) => example(out, serial, a),
        Command::DumpQuadrature(a) => dump_quadrature(config, out, a),
    }
}

fn load_config(path: Option<PathBuf>) -> Result<ExperimentConfig> {
    let path = path.ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
    let text = fs::read_to_string(&path).map_err(|e| tdse_core::Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path, source })
}

fn out_dir(flag: Option<PathBuf>, cfg: Option<&ExperimentConfig>) -> PathBuf {
    flag.or_else(|| cfg.and_then(|c| c.output.dir.clone())).unwrap_or_else(|| PathBuf::from("tdse-out"))
}

fn stem(cfg: &ExperimentConfig) -> String {
    if cfg.name.is_empty() {
        "run".into()
    } else {
        cfg.name.clone()
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| tdse_core::Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn run(config: Option<PathBuf>, out: Option<PathBuf>, serial: bool, solver: SolverKind, a: RunArgs) -> Result<ExitCode> {
    let mut cfg = load_config(config)?;
    cfg.solver = solver;
    if let Some(s) = a.steps {
        cfg.steps = s;
        cfg.dt = None;
    }
    if let Some(n) = a.order {
        cfg.order = n;
    }
    if let Some(m) = a.m {
        cfg.m = if m.len() == 1 { vec![m[0]; cfg.d] } else { m };
    }
    cfg.validate()?;
    let dir = out_dir(out, Some(&cfg));
    fs::create_dir_all(&dir)?;
    let name = stem(&cfg);

    let report = run_experiment(&cfg)?;
    let shape = cfg.m.clone();
    write_snapshot(&dir.join(format!("{name}_final.snap")), &SnapshotFile { t: report.t, shape: shape.clone(), data: report.u.clone() })?;
    for (k, s) in report.snapshots.iter().enumerate() {
        write_snapshot(&dir.join(format!("{name}_snap{k:04}.snap")), &SnapshotFile { t: s.t, shape: shape.clone(), data: s.u.clone() })?;
    }
    let mut meta = cfg.metadata()?;
    meta["result"] = json!({
        "t": report.t,
        "emax": report.errors.as_ref().map(|e| e.emax),
        "ionization": report.ionization,
        "transforms": [report.transform_counts.0, report.transform_counts.1],
    });
    if !serial {
        meta["result"]["wall_seconds"] = report.wall_seconds.into();
        meta["result"]["steps_per_second"] = report.steps_per_second.into();
    }
    write(&dir.join(format!("{name}.json")), &serde_json::to_string_pretty(&meta).expect("json value"))?;
    if let Some(e) = &report.errors {
        write(&dir.join(format!("{name}_errors.csv")), &e.to_csv(!serial))?;
        println!("Emax = {:e}", e.emax);
    }
    println!("t = {}  steps = {}  {:.1} steps/s", report.t, cfg.step_count()?, report.steps_per_second);
    if let Some(p) = report.ionization {
        println!("ionization = {:.4}%", 100.0 * p);
    }
    println!("wrote {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn convergence(config: Option<PathBuf>, out: Option<PathBuf>, serial: bool, a: ConvergenceArgs) -> Result<ExitCode> {
    let cfg = load_config(config)?;
    let s = a.sweep;
    let param = if let Some(values) = s.steps {
        SweepParam::Steps { values }
    } else if let Some(values) = s.m {
        SweepParam::M { values }
    } else if let Some(values) = s.h {
        SweepParam::H { axis: a.axis, values }
    } else {
        return Err(CliError::Usage("one of --steps, --m or --h is required".into()));
    };
    let table = convergence_sweep(&cfg, &param, serial)?;
    let dir = out_dir(out, Some(&cfg));
    fs::create_dir_all(&dir)?;
    let name = stem(&cfg);
    write(&dir.join(format!("{name}_{}.csv", param.name())), &table.to_csv(!serial))?;
    if let Some((t, u)) = &table.reference {
        write_snapshot(&dir.join(format!("{name}_reference.snap")), &SnapshotFile { t: *t, shape: cfg.m.clone(), data: u.clone() })?;
    }
    println!("{:>12} {:>12} {:>8}", table.parameter, "E", "order");
    for r in &table.rows {
        let o = r.observed_order.map(|o| format!("{o:.2}")).unwrap_or_default();
        println!("{:>12} {:>12.3e} {:>8}", r.param, r.error, o);
    }
    Ok(ExitCode::SUCCESS)
}

fn transform_test(out: Option<PathBuf>, a: TransformTestArgs) -> Result<ExitCode> {
    let c = TransformCheck {
        eps: a.eps,
        m: a.m,
        ne: a.ne,
        p: a.p,
        q: a.q,
        nr: a.nr,
        seeds: a.seeds,
        cmode: a.cmode.into(),
        include_2d: !a.no_2d,
        ..TransformCheck::default()
    };
    let rows = transform_check(&c)?;
    let mut csv = String::from("transform,block,max_rel_error,tolerance,pass\n");
    println!("{:<12} {:<8} {:>14} {:>10}  result", "transform", "block", "max_rel_err", "tol");
    for r in &rows {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        println!("{:<12} {:<8} {:>14.3e} {:>10.0e}  {verdict}", r.transform, r.block, r.max_rel_error, r.tolerance);
        csv.push_str(&format!("{},{},{:e},{:e},{}\n", r.transform, r.block, r.max_rel_error, r.tolerance, r.passed()));
    }
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        write(&dir.join("transform_test.csv"), &csv)?;
    }
    if rows.iter().all(|r| r.passed()) {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("transform test failed");
        Ok(ExitCode::from(3))
    }
}

fn example(out: Option<PathBuf>, serial: bool, a: ExampleArgs) -> Result<ExitCode> {
    let dir = out_dir(out, None);
    let outputs = run_example(&a.name, Some(&dir), serial, a.full)?;
    for o in &outputs {
        print!("{}", o.label);
        if let Some(t) = &o.table {
            let last = t.rows.last().expect("sweep rows");
            print!("  {} = {}  E = {:.3e}", t.parameter, last.param, last.error);
            if let Some(p) = t.orders().last() {
                print!("  order {p:.2}");
            }
        }
        if let Some(e) = o.report.as_ref().and_then(|r| r.errors.as_ref()) {
            print!("  Emax = {:.3e}", e.emax);
        }
        if let Some(p) = o.ionization {
            print!("  ionization {:.4}%", 100.0 * p);
        }
        println!();
    }
    println!("wrote {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn dump_quadrature(config: Option<PathBuf>, out: Option<PathBuf>, a: DumpArgs) -> Result<ExitCode> {
    let cfg = if config.is_some() {
        let e = load_config(config)?;
        e.contour_configs()?
            .get(a.axis)
            .copied()
            .ok_or_else(|| CliError::Usage(format!("axis {} out of range", a.axis)))?
    } else {
        let (eps, m) = match (a.eps, a.m) {
            (Some(eps), Some(m)) => (eps, m),
            _ => return Err(CliError::Usage("--eps and --m are required without --config".into())),
        };
        let mut c = ContourConfig::new(eps, m, a.ne.unwrap_or(1));
        c.p = a.p;
        c.q = a.q;
        c.nr = a.nr;
        c.d = a.d;
        c.phimax = a.phimax;
        c.vnorm = a.vnorm;
        if a.ne.is_none() {
            let h = match a.h {
                Some(h) => h,
                None => {
                    let kappa = alpert_rule(a.p)?.kappa as f64;
                    let coarsest = std::f64::consts::PI * m as f64 / (2.0 * ((m / 2) as f64 + 2.0 * kappa));
                    select_h(eps, a.vnorm, a.phimax, a.d)?.min(coarsest)
                }
            };
            c = c.with_spacing(h)?;
        }
        c
    };
    let q = build_quadrature(&cfg)?;
    let csv = q.to_csv();
    match out {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            write(&dir.join("quadrature.csv"), &csv)?;
        }
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
