//! Productive capacity and intermediate-input production constraints.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::econ::{CriticalityMatrix, CRITICAL, NON_CRITICAL};

/// Technical coefficients at or below this are treated as zero.
pub const COEFFICIENT_FLOOR: f64 = 1e-12;

/// Relative slack allowed before a guaranteed input counts as overdrawn.
const OVERDRAW_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProductionError {
    #[error("negative labor {value} for industry {industry}")]
    NegativeLabor { industry: usize, value: f64 },
    #[error("input {input} overdrawn by industry {industry}: need {need}, hold {stock}")]
    CriticalOverdraw {
        input: usize,
        industry: usize,
        need: f64,
        stock: f64,
    },
    #[error("unknown production function {0:?}")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ProductionKind {
    Leontief,
    Ihs1,
    Ihs2,
    Ihs3,
    Linear,
    /// Nested-CES limit with every input critical.
    CesLeontief,
    /// Nested-CES limit with important inputs counted as critical when
    /// `important_critical`, else as non-critical.
    CesIhs13 {
        important_critical: bool,
    },
    CesIhs2,
}

impl ProductionKind {
    /// The five main specifications.
    pub const MAIN: [ProductionKind; 5] = [
        Self::Leontief,
        Self::Ihs1,
        Self::Ihs2,
        Self::Ihs3,
        Self::Linear,
    ];

    pub const ALL: [ProductionKind; 9] = [
        Self::Leontief,
        Self::Ihs1,
        Self::Ihs2,
        Self::Ihs3,
        Self::Linear,
        Self::CesLeontief,
        Self::CesIhs13 {
            important_critical: true,
        },
        Self::CesIhs13 {
            important_critical: false,
        },
        Self::CesIhs2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Leontief => "leontief",
            Self::Ihs1 => "ihs1",
            Self::Ihs2 => "ihs2",
            Self::Ihs3 => "ihs3",
            Self::Linear => "linear",
            Self::CesLeontief => "ces_leontief",
            Self::CesIhs13 {
                important_critical: true,
            } => "ces_ihs13_strict",
            Self::CesIhs13 {
                important_critical: false,
            } => "ces_ihs13_loose",
            Self::CesIhs2 => "ces_ihs2",
        }
    }

    /// The rating-based function whose constraint set this kind shares.
    pub fn base(self) -> ProductionKind {
        match self {
            Self::CesLeontief => Self::Leontief,
            Self::CesIhs13 {
                important_critical: true,
            } => Self::Ihs1,
            Self::CesIhs13 {
                important_critical: false,
            } => Self::Ihs3,
            Self::CesIhs2 => Self::Ihs2,
            k => k,
        }
    }

    pub fn is_ces_limit(self) -> bool {
        self.base() != self
    }

    /// Whether input `j` enters industry `i`'s min-operator directly and is
    /// therefore guaranteed to be on hand in full.
    fn binds(self, rating: f64) -> bool {
        match self.base() {
            Self::Leontief => true,
            Self::Ihs1 => rating != NON_CRITICAL,
            Self::Ihs2 | Self::Ihs3 => rating == CRITICAL,
            _ => false,
        }
    }

    fn halves_important(self) -> bool {
        self.base() == Self::Ihs2
    }
}

impl fmt::Display for ProductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProductionKind {
    type Err = ProductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ProductionError::UnknownKind(s.to_string()))
    }
}

impl TryFrom<String> for ProductionKind {
    type Error = ProductionError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ProductionKind> for String {
    fn from(k: ProductionKind) -> String {
        k.name().to_string()
    }
}

/// Output attainable from inventories. `Unbounded` when no input constrains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputBound {
    Finite(f64),
    Unbounded,
}

impl InputBound {
    pub fn min(self, other: InputBound) -> InputBound {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a.min(b)),
            (Self::Unbounded, b) => b,
            (a, Self::Unbounded) => a,
        }
    }

    pub fn min_with(self, v: f64) -> f64 {
        match self {
            Self::Finite(a) => a.min(v),
            Self::Unbounded => v,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(a) => Some(a),
            Self::Unbounded => None,
        }
    }

    /// True when this bound is strictly below `v`.
    pub fn is_below(self, v: f64) -> bool {
        matches!(self, Self::Finite(a) if a < v)
    }
}

impl fmt::Display for InputBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for InputBound {
    type Err = std::num::ParseFloatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "unbounded" {
            Ok(Self::Unbounded)
        } else {
            s.parse().map(Self::Finite)
        }
    }
}

/// Inventories plus the static data the production constraints read.
#[derive(Debug, Clone, Copy)]
pub struct InputState<'a> {
    /// `s[(j, i)]`: stock of input j held by industry i.
    pub s: &'a DMatrix<f64>,
    pub a: &'a DMatrix<f64>,
    pub criticality: &'a CriticalityMatrix,
    pub xcap0: &'a DVector<f64>,
}

pub fn capacity(
    l: &DVector<f64>,
    l0: &DVector<f64>,
    x0: &DVector<f64>,
) -> Result<DVector<f64>, ProductionError> {
    let mut out = DVector::zeros(l.len());
    for i in 0..l.len() {
        if l[i] < 0.0 {
            return Err(ProductionError::NegativeLabor {
                industry: i,
                value: l[i],
            });
        }
        out[i] = if l0[i] > 0.0 {
            l[i] / l0[i] * x0[i]
        } else {
            x0[i]
        };
    }
    Ok(out)
}

/// Input-constrained output of every industry under `kind`.
pub fn input_constrained_output(kind: ProductionKind, st: &InputState) -> Vec<InputBound> {
    let n = st.a.ncols();
    let nc = noncritical_linear_term(kind, st);
    (0..n)
        .map(|i| {
            let own = if kind.base() == ProductionKind::Linear {
                linear_bound(st, i)
            } else {
                min_ratio_bound(kind, st, i)
            };
            own.min(nc[i])
        })
        .collect()
}

fn min_ratio_bound(kind: ProductionKind, st: &InputState, i: usize) -> InputBound {
    let halve = kind.halves_important();
    let mut bound = InputBound::Unbounded;
    for j in 0..st.a.nrows() {
        let a = st.a[(j, i)];
        if a <= COEFFICIENT_FLOOR {
            continue;
        }
        let rating = st.criticality.rating(j, i);
        if kind.binds(rating) {
            bound = bound.min(InputBound::Finite(st.s[(j, i)] / a));
        } else if halve && st.criticality.is_important(j, i) {
            bound = bound.min(InputBound::Finite(0.5 * (st.s[(j, i)] / a + st.xcap0[i])));
        }
    }
    bound
}

fn linear_bound(st: &InputState, i: usize) -> InputBound {
    let mut s_sum = 0.0;
    let mut a_sum = 0.0;
    let mut smallest = f64::INFINITY;
    for j in 0..st.a.nrows() {
        let a = st.a[(j, i)];
        if a > COEFFICIENT_FLOOR {
            s_sum += st.s[(j, i)];
            a_sum += a;
            smallest = smallest.min(st.s[(j, i)] / a);
        }
    }
    if a_sum == 0.0 {
        InputBound::Unbounded
    } else {
        // The pooled ratio can never sit below the smallest single ratio;
        // keep it that way under rounding.
        InputBound::Finite((s_sum / a_sum).max(smallest))
    }
}

/// The pooled non-critical term that the CES-limit forms add to the min.
/// `Unbounded` for the rating-based kinds and for empty non-critical sets.
pub fn noncritical_linear_term(kind: ProductionKind, st: &InputState) -> Vec<InputBound> {
    let n = st.a.ncols();
    if !kind.is_ces_limit() {
        return vec![InputBound::Unbounded; n];
    }
    (0..n)
        .map(|i| {
            let mut s_sum = 0.0;
            let mut a_sum = 0.0;
            for j in 0..st.a.nrows() {
                let a = st.a[(j, i)];
                if a <= COEFFICIENT_FLOOR {
                    continue;
                }
                let rating = st.criticality.rating(j, i);
                let important_elsewhere =
                    kind.halves_important() && st.criticality.is_important(j, i);
                if !kind.binds(rating) && !important_elsewhere {
                    s_sum += st.s[(j, i)];
                    a_sum += a;
                }
            }
            if a_sum == 0.0 {
                InputBound::Unbounded
            } else {
                InputBound::Finite(s_sum / a_sum)
            }
        })
        .collect()
}

pub fn realized_output(d: &DVector<f64>, xcap: &DVector<f64>, xinp: &[InputBound]) -> DVector<f64> {
    DVector::from_iterator(
        d.len(),
        (0..d.len()).map(|i| xinp[i].min_with(xcap[i].min(d[i])).max(0.0)),
    )
}

/// Inputs consumed to produce `x`.
///
/// Inputs inside the kind's min-operator are used in full; a shortfall there
/// means output was computed inconsistently and is reported. Every other
/// input is used up to what is in stock.
pub fn input_usage(
    kind: ProductionKind,
    x: &DVector<f64>,
    st: &InputState,
) -> Result<DMatrix<f64>, ProductionError> {
    let (rows, cols) = st.a.shape();
    let mut usage = DMatrix::zeros(rows, cols);
    for i in 0..cols {
        for j in 0..rows {
            let a = st.a[(j, i)];
            let need = a * x[i];
            let stock = st.s[(j, i)];
            if a > COEFFICIENT_FLOOR
                && kind.binds(st.criticality.rating(j, i))
                && need > stock + OVERDRAW_TOL * need
            {
                return Err(ProductionError::CriticalOverdraw {
                    input: j,
                    industry: i,
                    need,
                    stock,
                });
            }
            usage[(j, i)] = need.min(stock);
        }
    }
    Ok(usage)
}
