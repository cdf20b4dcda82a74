//! TOML run configuration and the loading pipeline from files to a
//! calibrated [`Economy`], a shock specification and parameters.
//!
//! Relative paths are resolved against the directory holding the config
//! file. Everything except `[data] io_table` has a default, so a minimal
//! config runs the canonical lockdown experiment.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::Deserialize;
use thiserror::Error;

use crate::analysis::{parse_month, Axis, ParamName, ShockMode, SweepDesign};
use crate::dynamics::Params;
use crate::econ::{
    aggregate_ratings, inventory_targets_from_survey, validate_economy, CriticalityMatrix,
    EconError, Economy, IoTable, DEFAULT_MARKET_CLEARING_TOL,
};
use crate::io::{self as pio, IoError};
use crate::production::ProductionKind;
use crate::shocks::{
    default_category_shocks, Calendar, CategoryShock, IndustryAttributes, ScenarioSpec, ShockError,
    SupplyScenario,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Open {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Syntax {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{path}: {source}")]
    Data { path: PathBuf, source: IoError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Econ(#[from] EconError),
    #[error(transparent)]
    Shock(#[from] ShockError),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
    pub data: DataConfig,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub calendar: Calendar,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub single_shock: SingleShockConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
}

fn default_decay() -> f64 {
    0.95
}

fn default_tol() -> f64 {
    DEFAULT_MARKET_CLEARING_TOL
}

fn default_vector_column() -> String {
    "eps_s".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub io_table: PathBuf,
    /// Flows are per year and get divided by 365.
    #[serde(default)]
    pub annual: bool,
    /// Long-form analyst ratings. Without it every input is critical.
    pub ratings: Option<PathBuf>,
    /// Explicit `industry_code, n` vector; takes precedence over the survey.
    pub inventory_targets: Option<PathBuf>,
    pub inventory_survey: Option<PathBuf>,
    /// `source_code, target_code` mapping survey industries onto the table.
    pub survey_crosswalk: Option<PathBuf>,
    #[serde(default = "default_decay")]
    pub survey_decay: f64,
    /// Industries whose missing targets are filled from each other.
    #[serde(default)]
    pub service_codes: Vec<String>,
    pub attributes: Option<PathBuf>,
    /// Shock vectors for fixed-vector scenarios, keyed by scenario name.
    #[serde(default)]
    pub fixed_vectors: BTreeMap<SupplyScenario, PathBuf>,
    #[serde(default = "default_vector_column")]
    pub fixed_vector_column: String,
    #[serde(default = "default_tol")]
    pub market_clearing_tol: f64,
}

/// Other-final-demand category treatment: a fixed cut or `"preference"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum CategoryValue {
    Fixed(f64),
    Named(String),
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_supply")]
    pub supply: SupplyScenario,
    #[serde(default = "yes")]
    pub demand: bool,
    pub trade_codes: Option<Vec<String>>,
    /// Lockdown-level supply shock replacing the scenario value.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub categories: BTreeMap<String, CategoryValue>,
}

fn default_supply() -> SupplyScenario {
    SupplyScenario::S5
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            supply: default_supply(),
            demand: true,
            trade_codes: None,
            overrides: BTreeMap::new(),
            categories: BTreeMap::new(),
        }
    }
}

fn default_kind() -> ProductionKind {
    ProductionKind::Ihs2
}

fn default_out() -> PathBuf {
    "out".into()
}

fn default_seed() -> u64 {
    crate::toy::DEFAULT_SEED
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_kind")]
    pub kind: ProductionKind,
    /// Days to simulate; defaults to the end of June.
    pub horizon: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Only used when generating synthetic data.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            horizon: None,
            out: default_out(),
            seed: default_seed(),
        }
    }
}

/// Replacements for the calibrated defaults.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub tau: Option<f64>,
    pub gamma_h: Option<f64>,
    pub gamma_f: Option<f64>,
    pub rho: Option<f64>,
    pub m: Option<f64>,
    pub delta_s: Option<f64>,
    pub b: Option<f64>,
    pub l_share_recovery: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AxisValue {
    Number(f64),
    Name(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    /// A parameter name, `kind` or `scenario`.
    pub name: String,
    pub values: Vec<AxisValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignName {
    #[default]
    Cartesian,
    OneAtATime,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub axes: Vec<AxisConfig>,
    #[serde(default)]
    pub design: DesignName,
    #[serde(default)]
    pub link_gamma: bool,
}

fn default_modes() -> Vec<String> {
    vec!["supply".into(), "demand".into()]
}

fn default_grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

fn default_window() -> usize {
    30
}

fn default_kinds() -> Vec<ProductionKind> {
    ProductionKind::MAIN.to_vec()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleShockConfig {
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_window")]
    pub window_days: usize,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<ProductionKind>,
    /// Log-log regression of the end-of-window output fraction.
    pub regression: Option<RegressionConfig>,
}

impl Default for SingleShockConfig {
    fn default() -> Self {
        Self {
            modes: default_modes(),
            grid: default_grid(),
            window_days: default_window(),
            kinds: default_kinds(),
            regression: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionConfig {
    /// Any of `magnitude`, `upstreamness`, `multiplier`, `output_share`.
    pub regressors: Vec<String>,
}

pub const REGRESSORS: [&str; 4] = ["magnitude", "upstreamness", "multiplier", "output_share"];

fn default_months() -> Vec<String> {
    vec!["2020-04".into(), "2020-05".into(), "2020-06".into()]
}

fn default_base_month() -> String {
    "2020-02".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    #[serde(default = "default_months")]
    pub months: Vec<String>,
    #[serde(default = "default_base_month")]
    pub base_month: String,
    pub data_panel: Option<PathBuf>,
    /// Precomputed model panel; simulated from the config when absent.
    pub model_panel: Option<PathBuf>,
    /// `source_code, weight`; gross-output shares when absent.
    pub weights: Option<PathBuf>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            months: default_months(),
            base_month: default_base_month(),
            data_panel: None,
            model_panel: None,
            weights: None,
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Open {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base).map_err(|e| match e {
            ConfigError::Syntax { source, .. } => ConfigError::Syntax {
                path: path.to_path_buf(),
                source,
            },
            e => e,
        })
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|source| ConfigError::Syntax {
            path: PathBuf::from("<config>"),
            source,
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn open(&self, p: &Path) -> Result<(PathBuf, File)> {
        let path = self.resolve(p);
        let f = File::open(&path).map_err(|source| ConfigError::Open {
            path: path.clone(),
            source,
        })?;
        Ok((path, f))
    }

    fn read<T>(&self, p: &Path, f: impl FnOnce(File) -> pio::Result<T>) -> Result<T> {
        let (path, file) = self.open(p)?;
        f(file).map_err(|source| ConfigError::Data { path, source })
    }

    pub fn horizon(&self) -> usize {
        self.run.horizon.unwrap_or(self.calendar.default_horizon())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(&self.run.out)
    }

    pub fn load_table(&self) -> Result<IoTable> {
        let t = self.read(&self.data.io_table, pio::read_io_table)?;
        Ok(if self.data.annual {
            t.annual_to_daily()
        } else {
            t
        })
    }

    pub fn load_criticality(&self, codes: &[String]) -> Result<CriticalityMatrix> {
        match &self.data.ratings {
            Some(p) => {
                let per = self.read(p, |f| pio::read_ratings(f, codes))?;
                Ok(aggregate_ratings(&per)?)
            }
            None => {
                log::warn!("no ratings file; treating every input as critical");
                Ok(CriticalityMatrix::all_critical(codes.len()))
            }
        }
    }

    pub fn load_inventory_targets(&self, codes: &[String]) -> Result<DVector<f64>> {
        if let Some(p) = &self.data.inventory_targets {
            let (c, v) = self.read(p, |f| pio::read_vector(f, "n"))?;
            let v = pio::align_vector(&c, &v, codes).map_err(|source| ConfigError::Data {
                path: self.resolve(p),
                source,
            })?;
            return Ok(DVector::from_vec(v));
        }
        let Some(p) = &self.data.inventory_survey else {
            return Err(ConfigError::Invalid(
                "[data] needs inventory_targets or inventory_survey".into(),
            ));
        };
        let records = self.read(p, pio::read_survey)?;
        let crosswalk = match &self.data.survey_crosswalk {
            Some(cw) => {
                let pairs = self.read(cw, pio::read_crosswalk)?;
                let mut map = HashMap::new();
                for (s, t) in pairs {
                    if map.insert(s.clone(), t).is_some() {
                        return Err(ConfigError::Invalid(format!(
                            "survey industry {s:?} mapped twice"
                        )));
                    }
                }
                Some(map)
            }
            None => None,
        };
        Ok(inventory_targets_from_survey(
            &records,
            codes,
            crosswalk.as_ref(),
            self.data.survey_decay,
            &self.data.service_codes,
        )?)
    }

    pub fn load_economy(&self) -> Result<Economy> {
        let table = self.load_table()?;
        let codes = table.industry_codes.clone();
        let crit = self.load_criticality(&codes)?;
        let targets = self.load_inventory_targets(&codes)?;
        Ok(validate_economy(
            &table,
            targets,
            crit,
            self.data.market_clearing_tol,
        )?)
    }

    /// Attributes in economy order. A run without any scenario shocks may
    /// omit the file; it then gets all-zero attributes.
    pub fn load_attributes(&self, econ: &Economy) -> Result<IndustryAttributes> {
        match &self.data.attributes {
            Some(p) => {
                let a = self.read(p, pio::read_attributes)?;
                Ok(a.aligned_to(&econ.industry_codes)?)
            }
            None if self.scenario.supply == SupplyScenario::None && !self.scenario.demand => {
                let zeros = vec![0.0; econ.n_industries()];
                Ok(IndustryAttributes {
                    industry_codes: econ.industry_codes.clone(),
                    rli: zeros.clone(),
                    ess: zeros.clone(),
                    ppi: zeros.clone(),
                    eps_d_lockdown: zeros,
                })
            }
            None => Err(ConfigError::Invalid(
                "[data] attributes is required for this scenario".into(),
            )),
        }
    }

    pub fn load_fixed_vectors(&self, econ: &Economy) -> Result<BTreeMap<SupplyScenario, Vec<f64>>> {
        let col = self.data.fixed_vector_column.as_str();
        self.data
            .fixed_vectors
            .iter()
            .map(|(s, p)| {
                let (c, v) = self.read(p, |f| pio::read_vector(f, col))?;
                let v = pio::align_vector(&c, &v, &econ.industry_codes).map_err(|source| {
                    ConfigError::Data {
                        path: self.resolve(p),
                        source,
                    }
                })?;
                Ok((*s, v))
            })
            .collect()
    }

    pub fn scenario_spec(
        &self,
        econ: &Economy,
        fixed: &BTreeMap<SupplyScenario, Vec<f64>>,
    ) -> Result<ScenarioSpec> {
        let sc = &self.scenario;
        let mut spec = ScenarioSpec::new(sc.supply, &econ.f_categories);
        spec.demand = sc.demand;
        spec.fixed_vector = fixed.get(&sc.supply).cloned();
        if let Some(t) = &sc.trade_codes {
            spec.trade_codes = t.clone();
        }
        spec.overrides = sc.overrides.iter().map(|(k, v)| (k.clone(), *v)).collect();
        spec.categories = category_shocks(&econ.f_categories, &sc.categories)?;
        Ok(spec)
    }

    /// Calibrated defaults with the configured overrides applied.
    pub fn params(&self, econ: &Economy) -> Params {
        let mut p = Params::calibrated(econ);
        let o = self.params;
        let calibrated_m = p.m;
        for (slot, v) in [
            (&mut p.tau, o.tau),
            (&mut p.gamma_h, o.gamma_h),
            (&mut p.gamma_f, o.gamma_f),
            (&mut p.rho, o.rho),
            (&mut p.m, o.m),
            (&mut p.delta_s, o.delta_s),
            (&mut p.b, o.b),
            (&mut p.l_share_recovery, o.l_share_recovery),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if (p.m - calibrated_m).abs() > 1e-12 {
            log::warn!(
                "m = {} differs from the table's {calibrated_m}; the pre-shock state will drift",
                p.m
            );
        }
        p
    }

    pub fn sweep_axes(&self) -> Result<Vec<Axis>> {
        self.sweep.axes.iter().map(parse_axis).collect()
    }

    pub fn sweep_design(&self) -> SweepDesign {
        match self.sweep.design {
            DesignName::Cartesian => SweepDesign::Cartesian,
            DesignName::OneAtATime => SweepDesign::OneAtATime,
        }
    }

    pub fn shock_modes(&self) -> Result<Vec<ShockMode>> {
        self.single_shock
            .modes
            .iter()
            .map(|m| m.parse().map_err(|e| ConfigError::Invalid(format!("{e}"))))
            .collect()
    }

    pub fn metric_months(&self) -> Result<(Vec<(i32, u32)>, (i32, u32))> {
        let parse = |s: &String| {
            parse_month(s).ok_or_else(|| ConfigError::Invalid(format!("bad month {s:?}")))
        };
        let months = self
            .metrics
            .months
            .iter()
            .map(parse)
            .collect::<Result<_>>()?;
        Ok((months, parse(&self.metrics.base_month)?))
    }
}

fn category_shocks(
    categories: &[String],
    given: &BTreeMap<String, CategoryValue>,
) -> Result<Vec<CategoryShock>> {
    let mut out = default_category_shocks(categories);
    for (name, v) in given {
        let k = categories
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown demand category {name:?}")))?;
        out[k] = match v {
            CategoryValue::Fixed(x) => CategoryShock::Fixed(*x),
            CategoryValue::Named(s) if s == "preference" => CategoryShock::FollowsPreference,
            CategoryValue::Named(s) => {
                return Err(ConfigError::Invalid(format!(
                    "category {name}: expected a number or \"preference\", got {s:?}"
                )))
            }
        };
    }
    Ok(out)
}

fn parse_axis(a: &AxisConfig) -> Result<Axis> {
    let bad = |what: &str| ConfigError::Invalid(format!("sweep axis {}: {what}", a.name));
    let names = || {
        a.values
            .iter()
            .map(|v| match v {
                AxisValue::Name(s) => Ok(s.as_str()),
                AxisValue::Number(_) => Err(bad("expected names")),
            })
            .collect::<Result<Vec<_>>>()
    };
    match a.name.as_str() {
        "kind" => Ok(Axis::Kind(
            names()?
                .into_iter()
                .map(|s| s.parse().map_err(|e| bad(&format!("{e}"))))
                .collect::<Result<_>>()?,
        )),
        "scenario" => Ok(Axis::Scenario(
            names()?
                .into_iter()
                .map(|s| s.parse().map_err(|e| bad(&format!("{e}"))))
                .collect::<Result<_>>()?,
        )),
        other => {
            let p: ParamName = other.parse().map_err(|e| bad(&format!("{e}")))?;
            let values = a
                .values
                .iter()
                .map(|v| match v {
                    AxisValue::Number(x) => Ok(*x),
                    AxisValue::Name(_) => Err(bad("expected numbers")),
                })
                .collect::<Result<_>>()?;
            Ok(Axis::Param(p, values))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::parse("[data]\nio_table = \"t.csv\"\n", Path::new("/cfg")).unwrap();
        assert_eq!(cfg.scenario.supply, SupplyScenario::S5);
        assert_eq!(cfg.run.kind, ProductionKind::Ihs2);
        assert_eq!(cfg.horizon(), 182);
        assert_eq!(cfg.resolve(Path::new("t.csv")), PathBuf::from("/cfg/t.csv"));
        assert_eq!(cfg.single_shock.window_days, 30);
        assert_eq!(cfg.single_shock.grid.len(), 10);
        assert_eq!(cfg.metric_months().unwrap().1, (2020, 2));
    }

    #[test]
    fn full_config_parses() {
        let text = r#"
[data]
io_table = "t.csv"
fixed_vectors = { s5 = "s5.csv", s6 = "s6.csv" }

[scenario]
supply = "s1"
demand = false
overrides = { L68 = 0.15 }
categories = { export = 0.2, government = "preference" }

[calendar]
lockdown_start = "2020-03-16"

[run]
kind = "ces_ihs13_loose"
horizon = 90

[params]
tau = 5

[[sweep.axes]]
name = "tau"
values = [5, 10]

[[sweep.axes]]
name = "kind"
values = ["leontief", "ihs2"]
"#;
        let cfg = RunConfig::parse(text, Path::new("")).unwrap();
        assert_eq!(cfg.scenario.supply, SupplyScenario::S1);
        assert_eq!(cfg.data.fixed_vectors.len(), 2);
        assert_eq!(
            cfg.calendar.lockdown_start,
            chrono::NaiveDate::from_ymd_opt(2020, 3, 16).unwrap()
        );
        assert_eq!(cfg.calendar.lockdown_end, Calendar::default().lockdown_end);
        assert_eq!(cfg.params.tau, Some(5.0));
        let axes = cfg.sweep_axes().unwrap();
        assert_eq!(axes[0], Axis::Param(ParamName::Tau, vec![5.0, 10.0]));
        assert_eq!(
            axes[1],
            Axis::Kind(vec![ProductionKind::Leontief, ProductionKind::Ihs2])
        );
        let cats: Vec<String> = crate::econ::DEFAULT_FINAL_DEMAND_CATEGORIES
            .iter()
            .map(|s| s.to_string())
            .collect();
        let shocks = category_shocks(&cats, &cfg.scenario.categories).unwrap();
        assert_eq!(shocks[1], CategoryShock::FollowsPreference);
        assert_eq!(shocks[3], CategoryShock::Fixed(0.2));
        assert_eq!(shocks[2], CategoryShock::Fixed(0.15));
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        let base = "[data]\nio_table = \"t.csv\"\n";
        assert!(RunConfig::parse(&format!("{base}[run]\nkindd = \"x\"\n"), Path::new("")).is_err());
        assert!(
            RunConfig::parse(&format!("{base}[run]\nkind = \"cobb\"\n"), Path::new("")).is_err()
        );
        assert!(RunConfig::parse(
            &format!("{base}[scenario]\nsupply = \"s9\"\n"),
            Path::new("")
        )
        .is_err());
        let cfg = RunConfig::parse(
            &format!("{base}[[sweep.axes]]\nname = \"kind\"\nvalues = [1]\n"),
            Path::new(""),
        )
        .unwrap();
        assert!(cfg.sweep_axes().is_err());
        let cats = vec!["export".to_string()];
        let mut m = BTreeMap::new();
        m.insert("exports".to_string(), CategoryValue::Fixed(0.1));
        assert!(category_shocks(&cats, &m).is_err());
    }
}
