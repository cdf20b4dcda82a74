//! Day-indexed shock schedules: labor supply, consumer preferences, other
//! final demand and the expectation phase.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShockError {
    #[error("calendar out of order: {0}")]
    CalendarOrder(String),
    #[error("attribute {field} = {value} for {industry:?} is outside [0, 1]")]
    InvalidAttribute {
        industry: String,
        field: &'static str,
        value: f64,
    },
    #[error("no attributes for industry {0:?}")]
    MissingIndustry(String),
    #[error("physical proximity index is zero for every industry")]
    ZeroPpi,
    #[error("scaling {0} outside (0, 1]")]
    InvalidScaling(f64),
    #[error("shock {value} for {what} is outside [0, 1]")]
    OutOfRange { what: String, value: f64 },
    #[error("scenario {0} needs a fixed shock vector")]
    MissingVector(SupplyScenario),
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("vector has {got} entries for {expected} industries")]
    Length { got: usize, expected: usize },
}

pub type Result<T> = std::result::Result<T, ShockError>;

/// Per-industry inputs to the supply and demand shock formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct IndustryAttributes {
    pub industry_codes: Vec<String>,
    pub rli: Vec<f64>,
    pub ess: Vec<f64>,
    pub ppi: Vec<f64>,
    pub eps_d_lockdown: Vec<f64>,
}

impl IndustryAttributes {
    pub fn validate(&self) -> Result<()> {
        let n = self.industry_codes.len();
        for (field, v) in [
            ("rli", &self.rli),
            ("ess", &self.ess),
            ("ppi", &self.ppi),
            ("eps_d", &self.eps_d_lockdown),
        ] {
            if v.len() != n {
                return Err(ShockError::Length {
                    got: v.len(),
                    expected: n,
                });
            }
            for (i, &value) in v.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(ShockError::InvalidAttribute {
                        industry: self.industry_codes[i].clone(),
                        field,
                        value,
                    });
                }
            }
        }
        Ok(())
    }

    /// Reorders to match `codes`, failing on any code without attributes.
    pub fn aligned_to(&self, codes: &[String]) -> Result<IndustryAttributes> {
        let pos: HashMap<&str, usize> = self
            .industry_codes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let idx = codes
            .iter()
            .map(|c| {
                pos.get(c.as_str())
                    .copied()
                    .ok_or_else(|| ShockError::MissingIndustry(c.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let pick = |v: &Vec<f64>| idx.iter().map(|&i| v[i]).collect();
        Ok(IndustryAttributes {
            industry_codes: codes.to_vec(),
            rli: pick(&self.rli),
            ess: pick(&self.ess),
            ppi: pick(&self.ppi),
            eps_d_lockdown: pick(&self.eps_d_lockdown),
        })
    }

    pub fn n(&self) -> usize {
        self.industry_codes.len()
    }
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid literal date")
}

/// Key dates of a scenario. Day 0 is `sim_start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Calendar {
    pub sim_start: NaiveDate,
    pub lockdown_start: NaiveDate,
    pub lockdown_end: NaiveDate,
    /// When labor restrictions on trade industries are lifted.
    pub trade_reopen: NaiveDate,
    /// When remaining labor restrictions are lifted.
    pub other_reopen: NaiveDate,
    /// When infection-fear demand shocks have fully faded.
    pub demand_end: NaiveDate,
}

impl Default for Calendar {
    fn default() -> Self {
        Self {
            sim_start: ymd(2020, 1, 1),
            lockdown_start: ymd(2020, 3, 23),
            lockdown_end: ymd(2020, 5, 13),
            trade_reopen: ymd(2020, 6, 15),
            other_reopen: ymd(2020, 7, 1),
            demand_end: ymd(2020, 8, 11),
        }
    }
}

impl Calendar {
    /// Horizon that ends on June 30 of the start year, inclusive.
    pub fn default_horizon(&self) -> usize {
        let end = NaiveDate::from_ymd_opt(chrono::Datelike::year(&self.sim_start), 6, 30)
            .expect("June 30 exists");
        (self.day(end) + 1).max(1) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (
                self.sim_start < self.lockdown_start,
                "sim_start < lockdown_start",
            ),
            (
                self.lockdown_start < self.lockdown_end,
                "lockdown_start < lockdown_end",
            ),
            (
                self.lockdown_end <= self.demand_end,
                "lockdown_end <= demand_end",
            ),
            (
                self.lockdown_end <= self.trade_reopen,
                "lockdown_end <= trade_reopen",
            ),
            (
                self.lockdown_end <= self.other_reopen,
                "lockdown_end <= other_reopen",
            ),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(ShockError::CalendarOrder(format!("expected {what}")));
            }
        }
        Ok(())
    }

    pub fn day(&self, date: NaiveDate) -> i64 {
        (date - self.sim_start).num_days()
    }

    pub fn date(&self, day: usize) -> NaiveDate {
        self.sim_start + chrono::Days::new(day as u64)
    }
}

/// Which branch of the permanent-income expectation applies on a day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum XiPhase {
    Pre,
    Lockdown,
    Post,
}

/// Treatment of one other-final-demand category.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CategoryShock {
    Fixed(f64),
    /// Same industry-specific shock as household consumption preferences.
    FollowsPreference,
}

/// Default category treatment: investment and exports down 15%, non-profit
/// spending follows consumer preferences, everything else unshocked.
pub fn default_category_shocks(categories: &[String]) -> Vec<CategoryShock> {
    categories
        .iter()
        .map(|c| match c.as_str() {
            "investment" | "export" => CategoryShock::Fixed(0.15),
            "npish" => CategoryShock::FollowsPreference,
            _ => CategoryShock::Fixed(0.0),
        })
        .collect()
}

/// Fully compiled exogenous inputs for a run of `horizon` days.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockSchedule {
    pub calendar: Calendar,
    /// `eps_s[t][i]`: first-order labor supply shock.
    pub eps_s: Vec<Vec<f64>>,
    /// `eps_d[t][i]`: consumer preference shock.
    pub eps_d: Vec<Vec<f64>>,
    /// `f_factor[t][(i, k)]`: multiplier on other final demand.
    pub f_factor: Vec<DMatrix<f64>>,
    pub xi_phase: Vec<XiPhase>,
    /// Whether lost labor income is partly replaced by benefits.
    pub benefits: Vec<bool>,
}

impl ShockSchedule {
    /// No shocks at all; the economy stays at its steady state.
    pub fn quiet(calendar: Calendar, n: usize, n_categories: usize, horizon: usize) -> Self {
        Self {
            calendar,
            eps_s: vec![vec![0.0; n]; horizon],
            eps_d: vec![vec![0.0; n]; horizon],
            f_factor: vec![DMatrix::from_element(n, n_categories, 1.0); horizon],
            xi_phase: vec![XiPhase::Pre; horizon],
            benefits: vec![false; horizon],
        }
    }

    pub fn horizon(&self) -> usize {
        self.eps_s.len()
    }

    pub fn has_supply_shocks(&self) -> bool {
        self.eps_s.iter().flatten().any(|v| *v != 0.0)
    }
}

fn days_in(
    calendar: &Calendar,
    from: NaiveDate,
    to: NaiveDate,
    horizon: usize,
) -> std::ops::Range<usize> {
    let clamp = |d: i64| d.clamp(0, horizon as i64) as usize;
    clamp(calendar.day(from))..clamp(calendar.day(to))
}

/// Default trade industries for staggered reopening.
pub fn default_trade_codes() -> Vec<String> {
    vec!["G45".into(), "G47".into()]
}

/// Shock of the legal-closure scenario: workers who can neither work
/// remotely nor are essential.
pub fn s1_value(rli: f64, ess: f64) -> f64 {
    (1.0 - rli) * (1.0 - ess)
}

/// Legal closures plus social-distancing difficulty. `elapsed` is the
/// fraction of the lockdown already past, so the proximity term fades
/// linearly from full strength to zero.
pub fn s234_value(rli: f64, ess: f64, ppi: f64, ppi_max: f64, iota: f64, elapsed: f64) -> f64 {
    let ppi_t = ppi * (1.0 - elapsed);
    (1.0 - rli) * (1.0 - ess * (1.0 - iota * ppi_t / ppi_max))
}

/// Closure shocks constant from lockdown start; trade industries reopen at
/// `trade_reopen`, all others at `other_reopen`.
pub fn supply_s1(
    attrs: &IndustryAttributes,
    calendar: &Calendar,
    trade_codes: &[String],
    horizon: usize,
) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; attrs.n()]; horizon];
    for i in 0..attrs.n() {
        let reopen = if trade_codes.contains(&attrs.industry_codes[i]) {
            calendar.trade_reopen
        } else {
            calendar.other_reopen
        };
        let v = s1_value(attrs.rli[i], attrs.ess[i]);
        for t in days_in(calendar, calendar.lockdown_start, reopen, horizon) {
            out[t][i] = v;
        }
    }
    out
}

/// Distancing scenarios with scaling `iota`; zero from lockdown end.
pub fn supply_s234(
    attrs: &IndustryAttributes,
    iota: f64,
    calendar: &Calendar,
    horizon: usize,
) -> Result<Vec<Vec<f64>>> {
    if !(iota > 0.0 && iota <= 1.0) {
        return Err(ShockError::InvalidScaling(iota));
    }
    let ppi_max = attrs.ppi.iter().copied().fold(0.0, f64::max);
    if ppi_max <= 0.0 {
        return Err(ShockError::ZeroPpi);
    }
    let start = calendar.day(calendar.lockdown_start);
    let span = (calendar.day(calendar.lockdown_end) - start) as f64;
    let mut out = vec![vec![0.0; attrs.n()]; horizon];
    for t in days_in(
        calendar,
        calendar.lockdown_start,
        calendar.lockdown_end,
        horizon,
    ) {
        let elapsed = (t as i64 - start) as f64 / span;
        for i in 0..attrs.n() {
            out[t][i] = s234_value(
                attrs.rli[i],
                attrs.ess[i],
                attrs.ppi[i],
                ppi_max,
                iota,
                elapsed,
            );
        }
    }
    Ok(out)
}

/// A fixed per-industry shock held for the whole lockdown.
pub fn supply_fixed(vector: &[f64], calendar: &Calendar, horizon: usize) -> Result<Vec<Vec<f64>>> {
    for (i, &v) in vector.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(ShockError::OutOfRange {
                what: format!("industry {i}"),
                value: v,
            });
        }
    }
    let mut out = vec![vec![0.0; vector.len()]; horizon];
    for t in days_in(
        calendar,
        calendar.lockdown_start,
        calendar.lockdown_end,
        horizon,
    ) {
        out[t].copy_from_slice(vector);
    }
    Ok(out)
}

/// Preference shocks: constant during lockdown, then fading linearly to zero
/// at `demand_end`.
pub fn demand_schedule(
    attrs: &IndustryAttributes,
    calendar: &Calendar,
    horizon: usize,
) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; attrs.n()]; horizon];
    for t in days_in(
        calendar,
        calendar.lockdown_start,
        calendar.lockdown_end,
        horizon,
    ) {
        out[t].copy_from_slice(&attrs.eps_d_lockdown);
    }
    let end = calendar.day(calendar.lockdown_end);
    let span = (calendar.day(calendar.demand_end) - end) as f64;
    for t in days_in(
        calendar,
        calendar.lockdown_end,
        calendar.demand_end,
        horizon,
    ) {
        let remaining = 1.0 - (t as i64 - end) as f64 / span;
        for i in 0..attrs.n() {
            out[t][i] = attrs.eps_d_lockdown[i] * remaining;
        }
    }
    out
}

/// Multipliers on other final demand. Shocks switch on at lockdown start and
/// are never removed.
pub fn other_final_demand_schedule(
    categories: &[CategoryShock],
    eps_d: &[Vec<f64>],
    calendar: &Calendar,
    n: usize,
) -> Result<Vec<DMatrix<f64>>> {
    for (k, c) in categories.iter().enumerate() {
        if let CategoryShock::Fixed(v) = c {
            if !(0.0..=1.0).contains(v) {
                return Err(ShockError::OutOfRange {
                    what: format!("category {k}"),
                    value: *v,
                });
            }
        }
    }
    let start = calendar.day(calendar.lockdown_start);
    Ok(eps_d
        .iter()
        .enumerate()
        .map(|(t, eps)| {
            DMatrix::from_fn(n, categories.len(), |i, k| {
                if (t as i64) < start {
                    1.0
                } else {
                    match categories[k] {
                        CategoryShock::Fixed(v) => 1.0 - v,
                        CategoryShock::FollowsPreference => 1.0 - eps[i],
                    }
                }
            })
        })
        .collect())
}

pub fn xi_phases(calendar: &Calendar, horizon: usize) -> Vec<XiPhase> {
    let start = calendar.day(calendar.lockdown_start);
    let end = calendar.day(calendar.lockdown_end);
    (0..horizon as i64)
        .map(|t| {
            if t < start {
                XiPhase::Pre
            } else if t <= end {
                XiPhase::Lockdown
            } else {
                XiPhase::Post
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SupplyScenario {
    None,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    /// User-supplied fixed vector held through the lockdown.
    Custom,
}

impl SupplyScenario {
    pub const ALL: [SupplyScenario; 8] = [
        Self::None,
        Self::S1,
        Self::S2,
        Self::S3,
        Self::S4,
        Self::S5,
        Self::S6,
        Self::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::S1 => "s1",
            Self::S2 => "s2",
            Self::S3 => "s3",
            Self::S4 => "s4",
            Self::S5 => "s5",
            Self::S6 => "s6",
            Self::Custom => "custom",
        }
    }

    /// Distancing scale for S2–S4.
    pub fn iota(self) -> Option<f64> {
        match self {
            Self::S2 => Some(0.1),
            Self::S3 => Some(0.4),
            Self::S4 => Some(0.7),
            _ => None,
        }
    }
}

impl fmt::Display for SupplyScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SupplyScenario {
    type Err = ShockError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ShockError::UnknownScenario(s.to_string()))
    }
}

impl TryFrom<String> for SupplyScenario {
    type Error = ShockError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SupplyScenario> for String {
    fn from(s: SupplyScenario) -> String {
        s.name().to_string()
    }
}

/// Everything needed to compile a [`ShockSchedule`] for one economy.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub supply: SupplyScenario,
    /// Fixed vector for S5, S6 or custom scenarios, in economy order.
    pub fixed_vector: Option<Vec<f64>>,
    /// Whether infection-fear preference shocks are applied.
    pub demand: bool,
    pub categories: Vec<CategoryShock>,
    pub trade_codes: Vec<String>,
    /// Replacement lockdown-level supply shock for single industries.
    pub overrides: Vec<(String, f64)>,
}

impl ScenarioSpec {
    pub fn new(supply: SupplyScenario, f_categories: &[String]) -> Self {
        Self {
            supply,
            fixed_vector: None,
            demand: true,
            categories: default_category_shocks(f_categories),
            trade_codes: default_trade_codes(),
            overrides: Vec::new(),
        }
    }
}

/// Builds the day-indexed schedule for `attrs` (already in economy order).
pub fn compile_scenario(
    spec: &ScenarioSpec,
    attrs: &IndustryAttributes,
    calendar: &Calendar,
    horizon: usize,
) -> Result<ShockSchedule> {
    calendar.validate()?;
    attrs.validate()?;
    let n = attrs.n();
    let mut eps_s = match spec.supply {
        SupplyScenario::None => vec![vec![0.0; n]; horizon],
        SupplyScenario::S1 => supply_s1(attrs, calendar, &spec.trade_codes, horizon),
        s @ (SupplyScenario::S2 | SupplyScenario::S3 | SupplyScenario::S4) => supply_s234(
            attrs,
            s.iota().expect("distancing scenario"),
            calendar,
            horizon,
        )?,
        s @ (SupplyScenario::S5 | SupplyScenario::S6 | SupplyScenario::Custom) => {
            let v = spec
                .fixed_vector
                .as_ref()
                .ok_or(ShockError::MissingVector(s))?;
            if v.len() != n {
                return Err(ShockError::Length {
                    got: v.len(),
                    expected: n,
                });
            }
            supply_fixed(v, calendar, horizon)?
        }
    };

    for (code, value) in &spec.overrides {
        if !(0.0..=1.0).contains(value) {
            return Err(ShockError::OutOfRange {
                what: code.clone(),
                value: *value,
            });
        }
        let i = attrs
            .industry_codes
            .iter()
            .position(|c| c == code)
            .ok_or_else(|| ShockError::MissingIndustry(code.clone()))?;
        let lift = match spec.supply {
            SupplyScenario::S1 if spec.trade_codes.contains(code) => calendar.trade_reopen,
            SupplyScenario::S1 => calendar.other_reopen,
            _ => calendar.lockdown_end,
        };
        for t in days_in(calendar, calendar.lockdown_start, lift, horizon) {
            eps_s[t][i] = *value;
        }
    }

    let eps_d = if spec.demand {
        demand_schedule(attrs, calendar, horizon)
    } else {
        vec![vec![0.0; n]; horizon]
    };
    let f_factor = other_final_demand_schedule(&spec.categories, &eps_d, calendar, n)?;
    let xi_phase = xi_phases(calendar, horizon);
    let benefits = xi_phase.iter().map(|p| *p != XiPhase::Pre).collect();
    Ok(ShockSchedule {
        calendar: *calendar,
        eps_s,
        eps_d,
        f_factor,
        xi_phase,
        benefits,
    })
}
