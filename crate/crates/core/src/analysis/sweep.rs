use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use super::{AnalysisError, Result};
use crate::dynamics::{run, Params};
use crate::econ::Economy;
use crate::production::ProductionKind;
use crate::shocks::{
    compile_scenario, Calendar, IndustryAttributes, ScenarioSpec, ShockSchedule, SupplyScenario,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShockMode {
    Supply,
    Demand,
}

impl ShockMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Supply => "supply",
            Self::Demand => "demand",
        }
    }
}

impl FromStr for ShockMode {
    type Err = AnalysisError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "supply" => Ok(Self::Supply),
            "demand" => Ok(Self::Demand),
            other => Err(AnalysisError::InvalidAxis(format!(
                "unknown shock mode {other:?}"
            ))),
        }
    }
}

/// Schedule hitting one industry with a constant shock from day 0.
///
/// Supply mode caps the industry's labor at `1 - magnitude`. Demand mode
/// cuts household preference for its good and every other final demand
/// category for it by `magnitude`. Expectations stay at their pre-shock
/// level; benefits replace lost labor income as they would in a lockdown.
pub fn single_shock_schedule(
    econ: &Economy,
    mode: ShockMode,
    industry: usize,
    magnitude: f64,
    days: usize,
) -> ShockSchedule {
    let n = econ.n_industries();
    let mut s = ShockSchedule::quiet(Calendar::default(), n, econ.f_categories.len(), days);
    for t in 0..days {
        match mode {
            ShockMode::Supply => s.eps_s[t][industry] = magnitude,
            ShockMode::Demand => {
                s.eps_d[t][industry] = magnitude;
                s.f_factor[t].row_mut(industry).fill(1.0 - magnitude);
            }
        }
        s.benefits[t] = true;
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleShockCell {
    pub industry_code: String,
    pub magnitude: f64,
    pub kind: ProductionKind,
    /// Aggregate output on the last day of the window over steady state.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub mode: ShockMode,
    pub window_days: usize,
    /// Ordered by industry, then magnitude, then kind.
    pub cells: Vec<SingleShockCell>,
}

/// Shocks each industry in turn at every grid magnitude and records where
/// aggregate output stands at the end of the window.
///
/// Demand mode saves all of the preference-shocked spending.
pub fn single_shock_sweep(
    econ: &Economy,
    params: &Params,
    kinds: &[ProductionKind],
    mode: ShockMode,
    grid: &[f64],
    window_days: usize,
) -> Result<SweepResult> {
    if window_days == 0 {
        return Err(AnalysisError::InvalidWindow);
    }
    if let Some(&g) = grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(AnalysisError::InvalidGrid(g));
    }
    let params = match mode {
        ShockMode::Supply => *params,
        ShockMode::Demand => Params {
            delta_s: 1.0,
            ..*params
        },
    };
    let mut jobs = Vec::new();
    for j in 0..econ.n_industries() {
        for &g in grid {
            for &k in kinds {
                jobs.push((j, g, k));
            }
        }
    }
    let cells = jobs
        .par_iter()
        .map(|&(j, g, kind)| {
            let schedule = single_shock_schedule(econ, mode, j, g, window_days);
            let traj = run(econ, &params, &schedule, kind, window_days)?;
            let fraction = *traj
                .aggregate_output_fraction()
                .last()
                .expect("window is non-empty");
            Ok(SingleShockCell {
                industry_code: econ.industry_codes[j].clone(),
                magnitude: g,
                kind,
                fraction,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        mode,
        window_days,
        cells,
    })
}

const SWEEP_HEADER: [&str; 6] = [
    "mode",
    "window_days",
    "industry_code",
    "magnitude",
    "kind",
    "fraction",
];

impl SweepResult {
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(SWEEP_HEADER)?;
        for c in &self.cells {
            out.write_record([
                self.mode.name(),
                &self.window_days.to_string(),
                &c.industry_code,
                &c.magnitude.to_string(),
                c.kind.name(),
                &c.fraction.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads one mode's worth of rows written by [`SweepResult::write_csv`].
    pub fn read_csv<R: Read>(r: R) -> Result<SweepResult> {
        let bad = |m: String| AnalysisError::SweepFormat(m);
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.iter().ne(SWEEP_HEADER.iter().copied()) {
            return Err(bad("unexpected header".into()));
        }
        let mut mode = None;
        let mut window = None;
        let mut cells = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let err = |col: &str| bad(format!("line {}: bad {col}", line + 2));
            let m: ShockMode = rec[0].parse().map_err(|_| err("mode"))?;
            let w: usize = rec[1].parse().map_err(|_| err("window_days"))?;
            if mode.replace(m).is_some_and(|p| p != m) || window.replace(w).is_some_and(|p| p != w)
            {
                return Err(err("mode or window (mixed)"));
            }
            cells.push(SingleShockCell {
                industry_code: rec[2].to_string(),
                magnitude: rec[3].parse().map_err(|_| err("magnitude"))?,
                kind: rec[4].parse().map_err(|_| err("kind"))?,
                fraction: rec[5].parse().map_err(|_| err("fraction"))?,
            });
        }
        Ok(SweepResult {
            mode: mode.ok_or_else(|| bad("no rows".into()))?,
            window_days: window.unwrap_or(0),
            cells,
        })
    }
}

/// Behavioral parameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamName {
    Tau,
    GammaH,
    GammaF,
    Rho,
    M,
    DeltaS,
    B,
    LShareRecovery,
}

impl ParamName {
    pub const ALL: [ParamName; 8] = [
        Self::Tau,
        Self::GammaH,
        Self::GammaF,
        Self::Rho,
        Self::M,
        Self::DeltaS,
        Self::B,
        Self::LShareRecovery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tau => "tau",
            Self::GammaH => "gamma_h",
            Self::GammaF => "gamma_f",
            Self::Rho => "rho",
            Self::M => "m",
            Self::DeltaS => "delta_s",
            Self::B => "b",
            Self::LShareRecovery => "l_share_recovery",
        }
    }

    fn get(self, p: &Params) -> f64 {
        match self {
            Self::Tau => p.tau,
            Self::GammaH => p.gamma_h,
            Self::GammaF => p.gamma_f,
            Self::Rho => p.rho,
            Self::M => p.m,
            Self::DeltaS => p.delta_s,
            Self::B => p.b,
            Self::LShareRecovery => p.l_share_recovery,
        }
    }

    fn set(self, p: &mut Params, v: f64) {
        let slot = match self {
            Self::Tau => &mut p.tau,
            Self::GammaH => &mut p.gamma_h,
            Self::GammaF => &mut p.gamma_f,
            Self::Rho => &mut p.rho,
            Self::M => &mut p.m,
            Self::DeltaS => &mut p.delta_s,
            Self::B => &mut p.b,
            Self::LShareRecovery => &mut p.l_share_recovery,
        };
        *slot = v;
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamName {
    type Err = AnalysisError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| AnalysisError::InvalidAxis(format!("unknown parameter {s:?}")))
    }
}

/// One dimension of a sensitivity sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Param(ParamName, Vec<f64>),
    Kind(Vec<ProductionKind>),
    Scenario(Vec<SupplyScenario>),
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Param(p, _) => p.name(),
            Self::Kind(_) => "kind",
            Self::Scenario(_) => "scenario",
        }
    }

    fn len(&self) -> usize {
        match self {
            Self::Param(_, v) => v.len(),
            Self::Kind(v) => v.len(),
            Self::Scenario(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDesign {
    /// Every combination of axis values.
    Cartesian,
    /// Each axis varied alone, the others held at the base setting.
    OneAtATime,
}

/// The configuration every sweep cell starts from.
#[derive(Debug, Clone)]
pub struct SweepBase<'a> {
    pub econ: &'a Economy,
    /// Attributes in economy order.
    pub attrs: &'a IndustryAttributes,
    pub spec: ScenarioSpec,
    /// Shock vectors for fixed-vector scenarios appearing on a scenario axis.
    pub fixed_vectors: BTreeMap<SupplyScenario, Vec<f64>>,
    pub calendar: Calendar,
    pub horizon: usize,
    pub params: Params,
    pub kind: ProductionKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCell {
    /// `(axis name, value)` for every axis, in axis order.
    pub settings: Vec<(String, String)>,
    /// Aggregate output over steady state, per day.
    pub output_fraction: Vec<f64>,
    /// Aggregate household consumption, per day.
    pub consumption: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Plan {
    settings: Vec<(String, String)>,
    params: Params,
    kind: ProductionKind,
    scenario: SupplyScenario,
}

impl Plan {
    fn apply(&mut self, axis: &Axis, k: usize) {
        let label = match axis {
            Axis::Param(p, v) => {
                p.set(&mut self.params, v[k]);
                v[k].to_string()
            }
            Axis::Kind(v) => {
                self.kind = v[k];
                v[k].name().to_string()
            }
            Axis::Scenario(v) => {
                self.scenario = v[k];
                v[k].name().to_string()
            }
        };
        let slot = self
            .settings
            .iter_mut()
            .find(|(n, _)| n == axis.name())
            .expect("axis registered");
        slot.1 = label;
    }
}

/// Runs the base configuration once per cell of the sweep design.
///
/// With `link_gamma` the firing speed is always twice the hiring speed, so a
/// `gamma_f` axis is rejected. Cells come back in enumeration order:
/// the last axis varies fastest for Cartesian designs.
pub fn sensitivity_sweep(
    base: &SweepBase,
    axes: &[Axis],
    design: SweepDesign,
    link_gamma: bool,
) -> Result<Vec<SensitivityCell>> {
    for (i, a) in axes.iter().enumerate() {
        if a.len() == 0 {
            return Err(AnalysisError::InvalidAxis(format!(
                "{} has no values",
                a.name()
            )));
        }
        if axes[..i].iter().any(|b| b.name() == a.name()) {
            return Err(AnalysisError::InvalidAxis(format!(
                "{} listed twice",
                a.name()
            )));
        }
        if link_gamma && matches!(a, Axis::Param(ParamName::GammaF, _)) {
            return Err(AnalysisError::InvalidAxis(
                "gamma_f is tied to gamma_h".into(),
            ));
        }
    }

    let start = Plan {
        settings: axes
            .iter()
            .map(|a| {
                let v = match a {
                    Axis::Param(p, _) => p.get(&base.params).to_string(),
                    Axis::Kind(_) => base.kind.name().to_string(),
                    Axis::Scenario(_) => base.spec.supply.name().to_string(),
                };
                (a.name().to_string(), v)
            })
            .collect(),
        params: base.params,
        kind: base.kind,
        scenario: base.spec.supply,
    };

    let mut plans = Vec::new();
    match design {
        SweepDesign::Cartesian => {
            let total: usize = axes.iter().map(Axis::len).product();
            for mut idx in 0..total {
                let mut p = start.clone();
                for a in axes.iter().rev() {
                    p.apply(a, idx % a.len());
                    idx /= a.len();
                }
                plans.push(p);
            }
        }
        SweepDesign::OneAtATime => {
            for a in axes {
                for k in 0..a.len() {
                    let mut p = start.clone();
                    p.apply(a, k);
                    plans.push(p);
                }
            }
        }
    }
    for p in &mut plans {
        if link_gamma {
            p.params.gamma_f = 2.0 * p.params.gamma_h;
        }
        p.params.validate()?;
    }

    plans
        .par_iter()
        .map(|p| {
            let mut spec = base.spec.clone();
            spec.supply = p.scenario;
            if let Some(v) = base.fixed_vectors.get(&p.scenario) {
                spec.fixed_vector = Some(v.clone());
            }
            let schedule = compile_scenario(&spec, base.attrs, &base.calendar, base.horizon)?;
            let traj = run(base.econ, &p.params, &schedule, p.kind, base.horizon)?;
            Ok(SensitivityCell {
                settings: p.settings.clone(),
                output_fraction: traj.aggregate_output_fraction(),
                consumption: traj.aggregate_consumption(),
            })
        })
        .collect()
}

impl SensitivityCell {
    /// Long form, one row per cell and day:
    /// `cell, <axis columns>, day, output_fraction, consumption`.
    pub fn write_csv<W: Write>(cells: &[SensitivityCell], w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let axes: Vec<&str> = cells
            .first()
            .map(|c| c.settings.iter().map(|s| s.0.as_str()).collect())
            .unwrap_or_default();
        let mut header = vec!["cell"];
        header.extend(&axes);
        header.extend(["day", "output_fraction", "consumption"]);
        out.write_record(&header)?;
        for (k, c) in cells.iter().enumerate() {
            for (t, (x, cons)) in c.output_fraction.iter().zip(&c.consumption).enumerate() {
                let mut row = vec![k.to_string()];
                row.extend(c.settings.iter().map(|s| s.1.clone()));
                row.extend([t.to_string(), x.to_string(), cons.to_string()]);
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Vec<SensitivityCell>> {
        let bad = |m: String| AnalysisError::SweepFormat(m);
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        let h: Vec<&str> = header.iter().collect();
        let n = h.len();
        if n < 4 || h[0] != "cell" || h[n - 3..] != ["day", "output_fraction", "consumption"] {
            return Err(bad("unexpected header".into()));
        }
        let axes: Vec<String> = h[1..n - 3].iter().map(|s| s.to_string()).collect();
        let mut cells: Vec<SensitivityCell> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let err = |col: &str| bad(format!("line {}: bad {col}", line + 2));
            let k: usize = rec[0].parse().map_err(|_| err("cell"))?;
            let day: usize = rec[n - 3].parse().map_err(|_| err("day"))?;
            let x: f64 = rec[n - 2].parse().map_err(|_| err("output_fraction"))?;
            let c: f64 = rec[n - 1].parse().map_err(|_| err("consumption"))?;
            if k == cells.len() {
                let settings = axes
                    .iter()
                    .enumerate()
                    .map(|(a, name)| (name.clone(), rec[a + 1].to_string()))
                    .collect();
                cells.push(SensitivityCell {
                    settings,
                    output_fraction: Vec::new(),
                    consumption: Vec::new(),
                });
            } else if k + 1 != cells.len() {
                return Err(err("cell order"));
            }
            let cell = cells.last_mut().expect("just pushed");
            if day != cell.output_fraction.len() {
                return Err(err("day order"));
            }
            cell.output_fraction.push(x);
            cell.consumption.push(c);
        }
        Ok(cells)
    }

    /// One row per cell: settings plus final, minimum and mean output fraction.
    pub fn write_summary_csv<W: Write>(cells: &[SensitivityCell], w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["cell".to_string()];
        if let Some(c) = cells.first() {
            header.extend(c.settings.iter().map(|s| s.0.clone()));
        }
        header.extend(
            [
                "final_output_fraction",
                "min_output_fraction",
                "mean_output_fraction",
            ]
            .map(String::from),
        );
        out.write_record(&header)?;
        for (k, c) in cells.iter().enumerate() {
            let v = &c.output_fraction;
            let last = v.last().copied().unwrap_or(f64::NAN);
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let mut row = vec![k.to_string()];
            row.extend(c.settings.iter().map(|s| s.1.clone()));
            row.extend([last.to_string(), min.to_string(), mean.to_string()]);
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}
