//! Static economy representation and calibration mathematics.
//!
//! An [`Economy`] is the pre-shock steady state of an industry-level
//! input-output table expressed in daily flows. Everything here is immutable
//! after construction and safe to share across parallel simulation workers.

mod calibration;
mod centrality;

pub use calibration::{
    aggregate_ratings, crosswalk_aggregate, inventory_targets_from_survey, propensity_to_consume,
    Propensity, SurveyRecord,
};
pub use centrality::{output_multipliers, upstreamness};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default relative tolerance for the market-clearing identity.
pub const DEFAULT_MARKET_CLEARING_TOL: f64 = 1e-6;

/// Canonical names of the other-final-demand categories.
pub const DEFAULT_FINAL_DEMAND_CATEGORIES: [&str; 5] = [
    "npish",
    "government",
    "investment",
    "export",
    "inventory_change",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EconError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("duplicate industry code {0:?}")]
    DuplicateCode(String),
    #[error("negative flow at row {row}, column {col}")]
    NegativeFlow { row: usize, col: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("market clearing violated for industry {industry} (residual {residual})")]
    MarketClearingViolation { industry: usize, residual: f64 },
    #[error("industry {0} trades but has zero gross output")]
    ZeroOutputWithFlows(usize),
    #[error("invalid inventory target for industry {0}")]
    InvalidInventoryTarget(usize),
    #[error("invalid criticality rating {value} at ({input}, {industry})")]
    InvalidRating {
        input: usize,
        industry: usize,
        value: f64,
    },
    #[error("singular linear system")]
    SingularSystem,
    #[error("no inventory data for any industry")]
    NoDataAnywhere,
    #[error("non-positive turnover for industry {industry} in {year}")]
    NonPositiveTurnover { year: i32, industry: String },
    #[error("unknown survey industry {0:?}")]
    UnknownSourceIndustry(String),
    #[error("no rating matrices supplied")]
    EmptyInput,
    #[error("negative or non-finite weight for source {0:?}")]
    NegativeWeight(String),
    #[error("target {0:?} receives no source")]
    UnmappedTarget(String),
    #[error("target {0:?} has zero total weight")]
    ZeroWeightTarget(String),
    #[error("total labor income is zero")]
    ZeroLaborIncome,
}

pub type Result<T> = std::result::Result<T, EconError>;

/// Survey rating of one input for one industry.
pub const CRITICAL: f64 = 1.0;
pub const IMPORTANT: f64 = 0.5;
pub const NON_CRITICAL: f64 = 0.0;

/// Per (input, industry) criticality ratings in {0, 0.5, 1}.
///
/// Entry `(j, i)` rates input `j` for producing industry `i`. The diagonal is
/// always critical.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityMatrix {
    ratings: DMatrix<f64>,
}

impl CriticalityMatrix {
    pub fn new(mut ratings: DMatrix<f64>) -> Result<Self> {
        if !ratings.is_square() {
            return Err(EconError::DimensionMismatch(format!(
                "criticality matrix is {}x{}",
                ratings.nrows(),
                ratings.ncols()
            )));
        }
        for i in 0..ratings.ncols() {
            for j in 0..ratings.nrows() {
                let v = ratings[(j, i)];
                if v != CRITICAL && v != IMPORTANT && v != NON_CRITICAL {
                    return Err(EconError::InvalidRating {
                        input: j,
                        industry: i,
                        value: v,
                    });
                }
            }
            ratings[(i, i)] = CRITICAL;
        }
        Ok(Self { ratings })
    }

    /// Every input rated critical. Under this matrix all rating-based
    /// production functions coincide with Leontief.
    pub fn all_critical(n: usize) -> Self {
        Self {
            ratings: DMatrix::from_element(n, n, CRITICAL),
        }
    }

    pub fn n(&self) -> usize {
        self.ratings.nrows()
    }

    pub fn rating(&self, input: usize, industry: usize) -> f64 {
        self.ratings[(input, industry)]
    }

    pub fn is_critical(&self, input: usize, industry: usize) -> bool {
        self.ratings[(input, industry)] == CRITICAL
    }

    pub fn is_important(&self, input: usize, industry: usize) -> bool {
        self.ratings[(input, industry)] == IMPORTANT
    }

    pub fn ratings(&self) -> &DMatrix<f64> {
        &self.ratings
    }
}

/// Raw input-output table as ingested, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct IoTable {
    pub industry_codes: Vec<String>,
    /// Intermediate flows, row = supplier, column = user.
    pub z: DMatrix<f64>,
    pub c: DVector<f64>,
    /// Other final demand, one column per category.
    pub f: DMatrix<f64>,
    pub f_categories: Vec<String>,
    pub l: DVector<f64>,
    /// Gross output; recomputed from row totals when absent.
    pub x: Option<DVector<f64>>,
}

impl IoTable {
    /// Converts annual flows to daily flows.
    pub fn annual_to_daily(mut self) -> Self {
        let k = 1.0 / 365.0;
        self.z *= k;
        self.c *= k;
        self.f *= k;
        self.l *= k;
        if let Some(x) = self.x.as_mut() {
            *x *= k;
        }
        self
    }
}

/// Calibrated pre-shock steady state, in currency units per day.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    pub industry_codes: Vec<String>,
    pub z0: DMatrix<f64>,
    pub c0: DVector<f64>,
    pub f0: DMatrix<f64>,
    pub f_categories: Vec<String>,
    pub l0: DVector<f64>,
    pub x0: DVector<f64>,
    /// Days of input coverage targeted by each industry.
    pub inventory_targets: DVector<f64>,
    pub criticality: CriticalityMatrix,
}

impl Economy {
    pub fn n_industries(&self) -> usize {
        self.industry_codes.len()
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.industry_codes.iter().position(|c| c == code)
    }

    /// Total other final demand per industry.
    pub fn f0_total(&self) -> DVector<f64> {
        row_sums(&self.f0)
    }
}

pub(crate) fn row_sums(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.nrows(), m.row_iter().map(|r| r.sum()))
}

fn check_finite_nonneg(name: &str, m: &DMatrix<f64>) -> Result<()> {
    for (col, column) in m.column_iter().enumerate() {
        for (row, &v) in column.iter().enumerate() {
            if !v.is_finite() {
                return Err(EconError::NonFinite(format!("{name}[{row},{col}]")));
            }
            if v < 0.0 {
                return Err(EconError::NegativeFlow { row, col });
            }
        }
    }
    Ok(())
}

fn check_vec(name: &str, v: &DVector<f64>, n: usize) -> Result<()> {
    if v.len() != n {
        return Err(EconError::DimensionMismatch(format!(
            "{name} has length {}, expected {n}",
            v.len()
        )));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(EconError::NonFinite(format!("{name}[{i}]")));
        }
        if x < 0.0 {
            return Err(EconError::NegativeFlow { row: i, col: 0 });
        }
    }
    Ok(())
}

/// Validates a raw table and assembles the steady-state [`Economy`].
///
/// Gross output is always re-derived from row totals. A supplied `x` column
/// is only used to check market clearing within `rel_tol`; the canonical
/// value is the row total so that the steady state is an exact fixed point.
pub fn validate_economy(
    table: &IoTable,
    inventory_targets: DVector<f64>,
    criticality: CriticalityMatrix,
    rel_tol: f64,
) -> Result<Economy> {
    let n = table.industry_codes.len();
    let mut seen = std::collections::HashSet::new();
    for code in &table.industry_codes {
        if !seen.insert(code.as_str()) {
            return Err(EconError::DuplicateCode(code.clone()));
        }
    }
    if table.z.shape() != (n, n) {
        return Err(EconError::DimensionMismatch(format!(
            "Z is {}x{}, expected {n}x{n}",
            table.z.nrows(),
            table.z.ncols()
        )));
    }
    if table.f.nrows() != n || table.f.ncols() != table.f_categories.len() {
        return Err(EconError::DimensionMismatch(format!(
            "F is {}x{} with {} categories",
            table.f.nrows(),
            table.f.ncols(),
            table.f_categories.len()
        )));
    }
    check_finite_nonneg("Z", &table.z)?;
    check_finite_nonneg("F", &table.f)?;
    check_vec("c", &table.c, n)?;
    check_vec("l", &table.l, n)?;
    if let Some(x) = &table.x {
        check_vec("x", x, n)?;
    }
    if inventory_targets.len() != n {
        return Err(EconError::DimensionMismatch(format!(
            "{} inventory targets for {n} industries",
            inventory_targets.len()
        )));
    }
    if let Some(i) = inventory_targets
        .iter()
        .position(|v| !v.is_finite() || *v < 0.0)
    {
        return Err(EconError::InvalidInventoryTarget(i));
    }
    if criticality.n() != n {
        return Err(EconError::DimensionMismatch(format!(
            "criticality is {0}x{0}, expected {n}x{n}",
            criticality.n()
        )));
    }

    let fsum = row_sums(&table.f);
    let totals = row_sums(&table.z) + &table.c + &fsum;
    if let Some(x) = &table.x {
        for i in 0..n {
            let residual = x[i] - totals[i];
            if residual.abs() > rel_tol * x[i].abs().max(totals[i].abs()) {
                return Err(EconError::MarketClearingViolation {
                    industry: i,
                    residual,
                });
            }
        }
    }
    for i in 0..n {
        let trades = table.z.row(i).iter().any(|v| *v > 0.0)
            || table.z.column(i).iter().any(|v| *v > 0.0)
            || table.c[i] > 0.0
            || fsum[i] > 0.0;
        if trades && totals[i] <= 0.0 {
            return Err(EconError::ZeroOutputWithFlows(i));
        }
    }

    Ok(Economy {
        industry_codes: table.industry_codes.clone(),
        z0: table.z.clone(),
        c0: table.c.clone(),
        f0: table.f.clone(),
        f_categories: table.f_categories.clone(),
        l0: table.l.clone(),
        x0: totals,
        inventory_targets,
        criticality,
    })
}

/// Technical and allocation coefficients of the steady state.
#[derive(Debug, Clone)]
pub struct TechnicalCoefficients {
    /// `a[(j, i)] = z0[(j, i)] / x0[i]`: input j per unit output of i.
    pub a: DMatrix<f64>,
    /// `b_alloc[(i, j)] = z0[(i, j)] / x0[i]`: share of i's output sold to j.
    pub b_alloc: DMatrix<f64>,
}

pub fn technical_coefficients(econ: &Economy) -> TechnicalCoefficients {
    let n = econ.n_industries();
    let a = DMatrix::from_fn(n, n, |j, i| {
        let x = econ.x0[i];
        if x > 0.0 {
            econ.z0[(j, i)] / x
        } else {
            0.0
        }
    });
    let b_alloc = DMatrix::from_fn(n, n, |i, j| {
        let x = econ.x0[i];
        if x > 0.0 {
            econ.z0[(i, j)] / x
        } else {
            0.0
        }
    });
    TechnicalCoefficients { a, b_alloc }
}
