//! Forecast-error metrics, single-industry shock experiments, log-log
//! regression and parameter sweeps.

mod afe;
mod ols;
mod sweep;

pub use afe::{afe_aggregate, afe_sectoral, format_month, parse_month, MonthlyPanel, PanelSource};
pub use ols::{ols, ols_loglog, OlsFit};
pub use sweep::{
    sensitivity_sweep, single_shock_schedule, single_shock_sweep, Axis, ParamName, SensitivityCell,
    ShockMode, SingleShockCell, SweepBase, SweepDesign, SweepResult,
};

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::shocks::ShockError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("panels do not line up: {0}")]
    PanelMismatch(String),
    #[error("malformed panel: {0}")]
    PanelFormat(String),
    #[error("regressors are collinear")]
    RankDeficient,
    #[error("{rows} observations cannot identify {columns} coefficients")]
    TooFewRows { rows: usize, columns: usize },
    #[error("non-positive value in column {column}, row {row}")]
    NonPositiveValue { column: String, row: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("shock magnitude {0} outside [0, 1]")]
    InvalidGrid(f64),
    #[error("window must cover at least one day")]
    InvalidWindow,
    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),
    #[error("malformed sweep file: {0}")]
    SweepFormat(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Shocks(#[from] ShockError),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;
