//! Command-line front end. Every command reads a TOML config, writes CSV
//! into the output directory and maps failures onto exit codes: 0 success,
//! 1 runtime failure, 2 invalid input.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{
    afe_aggregate, afe_sectoral, ols_loglog, sensitivity_sweep, single_shock_sweep, AnalysisError,
    MonthlyPanel, PanelSource, SensitivityCell, SweepBase,
};
use crate::config::{ConfigError, RunConfig, REGRESSORS};
use crate::dynamics::{run, DynamicsError, Params};
use crate::econ::{
    output_multipliers, propensity_to_consume, technical_coefficients, upstreamness, EconError,
    Economy,
};
use crate::io as pio;
use crate::production::ProductionKind;
use crate::shocks::{
    compile_scenario, Calendar, IndustryAttributes, ScenarioSpec, ShockError, SupplyScenario,
};

#[derive(Debug, Parser)]
#[command(
    name = "prodnet",
    version,
    about = "Shock propagation in production networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Production function, overriding `[run] kind`.
    #[arg(long, global = true)]
    pub kind: Option<ProductionKind>,
    /// Supply scenario, overriding `[scenario] supply`.
    #[arg(long, global = true)]
    pub scenario: Option<SupplyScenario>,
    /// Output directory, overriding `[run] out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Check the data and compile the scenario without simulating.
    Validate,
    /// Write inventory targets, criticality ratings and network centralities.
    Calibrate,
    /// Simulate the configured scenario.
    Run,
    /// Sensitivity sweep over `[[sweep.axes]]`.
    Sweep,
    /// Shock one industry at a time.
    SingleShock,
    /// Forecast errors of a model panel against data.
    Metrics,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{} problem(s) found", .0.len())]
    Violations(Vec<String>),
}

impl From<EconError> for CliError {
    fn from(e: EconError) -> Self {
        Self::Config(e.into())
    }
}

impl From<ShockError> for CliError {
    fn from(e: ShockError) -> Self {
        Self::Config(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Usage(_) | Self::Violations(_) => 2,
            Self::Dynamics(DynamicsError::InvalidParam(_)) => 2,
            Self::Analysis(e) => match e {
                AnalysisError::InvalidGrid(_)
                | AnalysisError::InvalidWindow
                | AnalysisError::InvalidAxis(_)
                | AnalysisError::PanelFormat(_)
                | AnalysisError::PanelMismatch(_)
                | AnalysisError::Shocks(_)
                | AnalysisError::Dynamics(DynamicsError::InvalidParam(_)) => 2,
                _ => 1,
            },
            Self::Dynamics(_) | Self::Write { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            if let CliError::Violations(v) = &e {
                for line in v {
                    eprintln!("error: {line}");
                }
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let mut cfg = RunConfig::from_path(path)?;
    if let Some(k) = cli.kind {
        cfg.run.kind = k;
    }
    if let Some(s) = cli.scenario {
        cfg.scenario.supply = s;
    }
    let out = cli.out.clone().unwrap_or_else(|| cfg.out_dir());
    match cli.command {
        Command::Validate => cmd_validate(&cfg),
        Command::Calibrate => cmd_calibrate(&cfg, &out),
        Command::Run => {
            let bytes = std::fs::read(path).map_err(|source| ConfigError::Open {
                path: path.to_path_buf(),
                source,
            })?;
            cmd_run(&cfg, &bytes, &out)
        }
        Command::Sweep => cmd_sweep(&cfg, &out),
        Command::SingleShock => cmd_single_shock(&cfg, &out),
        Command::Metrics => cmd_metrics(&cfg, &out),
    }
}

/// Variant name of an error's `Debug` form, e.g. `NegativeFlow`.
fn variant<E: std::fmt::Debug>(e: &E) -> String {
    let d = format!("{e:?}");
    d.split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or("")
        .to_string()
}

fn describe(e: &ConfigError) -> String {
    match e {
        ConfigError::Econ(inner) => format!("{}: {inner}", variant(inner)),
        ConfigError::Shock(inner) => format!("{}: {inner}", variant(inner)),
        other => other.to_string(),
    }
}

/// Everything a simulation needs, loaded and checked.
struct Setup {
    econ: Economy,
    attrs: IndustryAttributes,
    fixed: BTreeMap<SupplyScenario, Vec<f64>>,
    spec: ScenarioSpec,
    params: Params,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let econ = cfg.load_economy()?;
    let attrs = cfg.load_attributes(&econ)?;
    let fixed = cfg.load_fixed_vectors(&econ)?;
    let spec = cfg.scenario_spec(&econ, &fixed)?;
    let params = cfg.params(&econ);
    params.validate()?;
    Ok(Setup {
        econ,
        attrs,
        fixed,
        spec,
        params,
    })
}

fn cmd_validate(cfg: &RunConfig) -> Result<()> {
    let mut problems = Vec::new();
    if let Err(e) = cfg.calendar.validate() {
        problems.push(describe(&e.into()));
    }
    if let Err(e) = cfg.sweep_axes() {
        problems.push(describe(&e));
    }
    if let Err(e) = cfg.shock_modes() {
        problems.push(describe(&e));
    }
    if let Err(e) = cfg.metric_months() {
        problems.push(describe(&e));
    }
    match cfg.load_economy() {
        Err(e) => problems.push(describe(&e)),
        Ok(econ) => {
            if let Err(e) = cfg.params(&econ).validate() {
                problems.push(format!("{}: {e}", variant(&e)));
            }
            let compiled = cfg.load_attributes(&econ).and_then(|attrs| {
                let fixed = cfg.load_fixed_vectors(&econ)?;
                let spec = cfg.scenario_spec(&econ, &fixed)?;
                Ok(compile_scenario(
                    &spec,
                    &attrs,
                    &cfg.calendar,
                    cfg.horizon(),
                )?)
            });
            match compiled {
                // the calendar problem is already listed
                Err(ConfigError::Shock(ShockError::CalendarOrder(_))) => {}
                Err(e) => problems.push(describe(&e)),
                Ok(_) => {}
            }
            if problems.is_empty() {
                println!(
                    "ok: {} industries, scenario {}, kind {}, {} days",
                    econ.n_industries(),
                    cfg.scenario.supply,
                    cfg.run.kind,
                    cfg.horizon()
                );
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violations(problems))
    }
}

fn create_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(
    dir: &Path,
    name: &str,
    f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<()> {
    let path = dir.join(name);
    let wrap = |source| CliError::Write {
        path: path.clone(),
        source,
    };
    let mut w = BufWriter::new(File::create(&path).map_err(wrap)?);
    f(&mut w).map_err(wrap)?;
    w.flush().map_err(wrap)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn cmd_calibrate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let econ = cfg.load_economy()?;
    let tc = technical_coefficients(&econ);
    let u = upstreamness(&tc)?;
    let mult = output_multipliers(&tc)?;
    let m = propensity_to_consume(&econ)?;
    let codes = &econ.industry_codes;
    create_out(out)?;
    write_file(out, "inventory_targets.csv", |w| {
        pio::write_vector(codes, "n", econ.inventory_targets.as_slice(), w)
    })?;
    write_file(out, "criticality.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["input_code", "industry_code", "rating"])?;
        for (i, ind) in codes.iter().enumerate() {
            for (j, inp) in codes.iter().enumerate() {
                c.write_record([inp, ind, &econ.criticality.rating(j, i).to_string()])?;
            }
        }
        c.flush()
    })?;
    write_file(out, "centrality.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["industry_code", "x0", "upstreamness", "multiplier"])?;
        for (i, code) in codes.iter().enumerate() {
            c.write_record([
                code.clone(),
                econ.x0[i].to_string(),
                u[i].to_string(),
                mult[i].to_string(),
            ])?;
        }
        c.flush()
    })?;
    write_file(out, "calibration.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["quantity", "value"])?;
        for (k, v) in [
            ("m", m.value),
            ("m_raw", m.raw),
            ("total_output", econ.x0.sum()),
            ("total_labor", econ.l0.sum()),
            ("total_consumption", econ.c0.sum()),
        ] {
            c.write_record([k, &v.to_string()])?;
        }
        c.flush()
    })
}

#[derive(Serialize)]
struct Manifest {
    scenario: String,
    kind: String,
    horizon: usize,
    n_industries: usize,
    config_sha256: String,
    params_sha256: String,
    params: Params,
    calendar: Calendar,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn cmd_run(cfg: &RunConfig, config_bytes: &[u8], out: &Path) -> Result<()> {
    let s = setup(cfg)?;
    let horizon = cfg.horizon();
    let schedule = compile_scenario(&s.spec, &s.attrs, &cfg.calendar, horizon)?;
    let traj = run(&s.econ, &s.params, &schedule, cfg.run.kind, horizon)?;
    create_out(out)?;
    write_file(out, "trajectory.csv", |w| {
        traj.write_csv(w).map_err(io::Error::from)
    })?;

    let params_text = toml::to_string(&s.params).expect("params serialize");
    let manifest = Manifest {
        scenario: cfg.scenario.supply.to_string(),
        kind: cfg.run.kind.to_string(),
        horizon,
        n_industries: s.econ.n_industries(),
        config_sha256: sha256_hex(config_bytes),
        params_sha256: sha256_hex(params_text.as_bytes()),
        params: s.params,
        calendar: cfg.calendar,
    };
    let text = toml::to_string(&manifest).expect("manifest serializes");
    write_file(out, "manifest.toml", |w| w.write_all(text.as_bytes()))?;

    let (_, base) = cfg.metric_months()?;
    match MonthlyPanel::from_trajectory(&traj, base) {
        Ok(panel) => write_file(out, "monthly_panel.csv", |w| {
            panel.write_csv(w).map_err(io::Error::from)
        })?,
        Err(e) => log::warn!("no monthly panel: {e}"),
    }
    let frac = traj.aggregate_output_fraction();
    if let (Some(last), Some(min)) = (frac.last(), frac.iter().copied().reduce(f64::min)) {
        println!(
            "final output {:.4} of steady state, minimum {:.4}",
            last, min
        );
    }
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<()> {
    let axes = cfg.sweep_axes()?;
    if axes.is_empty() {
        return Err(CliError::Usage("config has no [[sweep.axes]]".into()));
    }
    let s = setup(cfg)?;
    let base = SweepBase {
        econ: &s.econ,
        attrs: &s.attrs,
        spec: s.spec.clone(),
        fixed_vectors: s.fixed.clone(),
        calendar: cfg.calendar,
        horizon: cfg.horizon(),
        params: s.params,
        kind: cfg.run.kind,
    };
    let cells = sensitivity_sweep(&base, &axes, cfg.sweep_design(), cfg.sweep.link_gamma)?;
    create_out(out)?;
    write_file(out, "sweep.csv", |w| {
        SensitivityCell::write_csv(&cells, w).map_err(io::Error::from)
    })?;
    write_file(out, "sweep_summary.csv", |w| {
        SensitivityCell::write_summary_csv(&cells, w).map_err(io::Error::from)
    })?;
    println!("{} cells", cells.len());
    Ok(())
}

fn cmd_single_shock(cfg: &RunConfig, out: &Path) -> Result<()> {
    let modes = cfg.shock_modes()?;
    let sc = &cfg.single_shock;
    if let Some(r) = &sc.regression {
        if let Some(bad) = r
            .regressors
            .iter()
            .find(|x| !REGRESSORS.contains(&x.as_str()))
        {
            return Err(CliError::Usage(format!(
                "unknown regressor {bad:?}; expected one of {REGRESSORS:?}"
            )));
        }
    }
    let econ = cfg.load_economy()?;
    let params = cfg.params(&econ);
    params.validate()?;
    let mut results = Vec::new();
    for mode in modes {
        results.push(single_shock_sweep(
            &econ,
            &params,
            &sc.kinds,
            mode,
            &sc.grid,
            sc.window_days,
        )?);
    }
    create_out(out)?;
    for r in &results {
        write_file(out, &format!("single_shock_{}.csv", r.mode.name()), |w| {
            r.write_csv(w).map_err(io::Error::from)
        })?;
    }
    let Some(reg) = &sc.regression else {
        return Ok(());
    };

    let tc = technical_coefficients(&econ);
    let u = upstreamness(&tc)?;
    let mult = output_multipliers(&tc)?;
    let total = econ.x0.sum();
    let mut rows: Vec<[String; 7]> = Vec::new();
    for r in &results {
        for &kind in &sc.kinds {
            let cells: Vec<_> = r.cells.iter().filter(|c| c.kind == kind).collect();
            let y: Vec<f64> = cells.iter().map(|c| c.fraction).collect();
            let columns: Vec<(String, Vec<f64>)> = reg
                .regressors
                .iter()
                .map(|name| {
                    let v = cells
                        .iter()
                        .map(|c| {
                            let i = econ.index_of(&c.industry_code).expect("own industry");
                            match name.as_str() {
                                "magnitude" => c.magnitude,
                                "upstreamness" => u[i],
                                "multiplier" => mult[i],
                                _ => econ.x0[i] / total,
                            }
                        })
                        .collect();
                    (name.clone(), v)
                })
                .collect();
            let fit = ols_loglog(&y, &columns)?;
            for (k, name) in fit.names.iter().enumerate() {
                rows.push([
                    r.mode.name().to_string(),
                    kind.name().to_string(),
                    name.clone(),
                    fit.coefficients[k].to_string(),
                    fit.std_errors[k].to_string(),
                    fit.adjusted_r2.to_string(),
                    fit.n_obs.to_string(),
                ]);
            }
        }
    }
    write_file(out, "regression.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record([
            "mode",
            "kind",
            "term",
            "coefficient",
            "std_error",
            "adjusted_r2",
            "n_obs",
        ])?;
        for row in &rows {
            c.write_record(row)?;
        }
        c.flush()
    })
}

fn read_panel(cfg: &RunConfig, p: &Path, source: PanelSource) -> Result<MonthlyPanel> {
    let path = cfg.resolve(p);
    let f = File::open(&path).map_err(|source| ConfigError::Open {
        path: path.clone(),
        source,
    })?;
    MonthlyPanel::read_csv(f, source)
        .map_err(|e| match e {
            AnalysisError::PanelFormat(m) => {
                AnalysisError::PanelFormat(format!("{}: {m}", path.display()))
            }
            e => e,
        })
        .map_err(CliError::from)
}

fn cmd_metrics(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (months, base) = cfg.metric_months()?;
    let mc = &cfg.metrics;
    let data_path = mc
        .data_panel
        .as_deref()
        .ok_or_else(|| CliError::Usage("[metrics] data_panel is required".into()))?;
    let data = read_panel(cfg, data_path, PanelSource::Empirical)?;

    let need_econ = mc.model_panel.is_none() || mc.weights.is_none();
    let econ = if need_econ {
        Some(cfg.load_economy()?)
    } else {
        None
    };
    let model = match &mc.model_panel {
        Some(p) => read_panel(cfg, p, PanelSource::Model)?,
        None => {
            let s = setup(cfg)?;
            let horizon = cfg.horizon();
            let schedule = compile_scenario(&s.spec, &s.attrs, &cfg.calendar, horizon)?;
            let traj = run(&s.econ, &s.params, &schedule, cfg.run.kind, horizon)?;
            MonthlyPanel::from_trajectory(&traj, base)?
        }
    };
    let (codes, weights) = match &mc.weights {
        Some(p) => {
            let path = cfg.resolve(p);
            let f = File::open(&path).map_err(|source| ConfigError::Open {
                path: path.clone(),
                source,
            })?;
            pio::read_weights(f).map_err(|source| ConfigError::Data { path, source })?
        }
        None => {
            let e = econ.as_ref().expect("economy loaded");
            (e.industry_codes.clone(), e.x0.iter().copied().collect())
        }
    };
    let sec = afe_sectoral(&model, &data, &codes, &weights, &months)?;
    let agg = afe_aggregate(&model, &data, &codes, &weights, &months)?;
    create_out(out)?;
    write_file(out, "metrics.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["afe_sectoral", "afe_aggregate", "n_months"])?;
        c.write_record([sec.to_string(), agg.to_string(), months.len().to_string()])?;
        c.flush()
    })?;
    println!("sectoral {sec:.3} p.p., aggregate {agg:+.3} p.p.");
    Ok(())
}
