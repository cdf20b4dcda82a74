use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use nalgebra::DMatrix;

use super::{AnalysisError, Result};
use crate::dynamics::Trajectory;

/// Where a panel's numbers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelSource {
    Model,
    Empirical,
}

impl PanelSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::Model => "model",
            Self::Empirical => "empirical",
        }
    }
}

/// Monthly output per industry as a percentage of a base month.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyPanel {
    pub industry_codes: Vec<String>,
    /// `(year, month)` in chronological order.
    pub months: Vec<(i32, u32)>,
    /// Industry by month.
    pub values: DMatrix<f64>,
    pub source: PanelSource,
}

pub fn format_month((y, m): (i32, u32)) -> String {
    format!("{y:04}-{m:02}")
}

pub fn parse_month(s: &str) -> Option<(i32, u32)> {
    let (y, m) = s.trim().split_once('-')?;
    let y: i32 = y.parse().ok()?;
    let m: u32 = m.parse().ok()?;
    (1..=12).contains(&m).then_some((y, m))
}

impl MonthlyPanel {
    /// Calendar-month means of simulated output rebased to `base = 100`.
    ///
    /// Industries with zero output in the base month are reported at 100
    /// throughout; they have nothing to lose.
    pub fn from_trajectory(traj: &Trajectory, base: (i32, u32)) -> Result<MonthlyPanel> {
        let mm = traj.monthly_means();
        let b = mm.months.iter().position(|m| *m == base).ok_or_else(|| {
            AnalysisError::PanelMismatch(format!("base month {} not simulated", format_month(base)))
        })?;
        let values = DMatrix::from_fn(mm.values.nrows(), mm.values.ncols(), |i, t| {
            let denom = mm.values[(i, b)];
            if denom > 0.0 {
                100.0 * mm.values[(i, t)] / denom
            } else {
                100.0
            }
        });
        Ok(MonthlyPanel {
            industry_codes: traj.industry_codes.clone(),
            months: mm.months,
            values,
            source: PanelSource::Model,
        })
    }

    pub fn value(&self, code: &str, month: (i32, u32)) -> Option<f64> {
        let i = self.industry_codes.iter().position(|c| c == code)?;
        let t = self.months.iter().position(|m| *m == month)?;
        Some(self.values[(i, t)])
    }

    /// Long form: `industry_code, month, value, source`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["industry_code", "month", "value", "source"])?;
        for (i, code) in self.industry_codes.iter().enumerate() {
            for (t, m) in self.months.iter().enumerate() {
                out.write_record([
                    code.as_str(),
                    &format_month(*m),
                    &self.values[(i, t)].to_string(),
                    self.source.name(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the long form written by [`MonthlyPanel::write_csv`]. The
    /// `source` column is optional and defaults to `default_source`.
    /// Every industry must report every month.
    pub fn read_csv<R: Read>(r: R, default_source: PanelSource) -> Result<MonthlyPanel> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr
            .headers()
            .map_err(|e| AnalysisError::PanelFormat(e.to_string()))?
            .clone();
        let col = |name: &str| header.iter().position(|h| h.trim() == name);
        let (Some(ci), Some(mi), Some(vi)) = (col("industry_code"), col("month"), col("value"))
        else {
            return Err(AnalysisError::PanelFormat(
                "need industry_code, month, value columns".into(),
            ));
        };
        let si = col("source");
        let mut codes: Vec<String> = Vec::new();
        let mut cells: BTreeMap<(usize, (i32, u32)), f64> = BTreeMap::new();
        let mut source = default_source;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| AnalysisError::PanelFormat(e.to_string()))?;
            let line = line + 2;
            let code = rec.get(ci).unwrap_or("").trim().to_string();
            let month = parse_month(rec.get(mi).unwrap_or(""))
                .ok_or_else(|| AnalysisError::PanelFormat(format!("line {line}: bad month")))?;
            let value: f64 = rec
                .get(vi)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| AnalysisError::PanelFormat(format!("line {line}: bad value")))?;
            if !(value.is_finite() && value > 0.0) {
                return Err(AnalysisError::PanelFormat(format!(
                    "line {line}: value must be positive"
                )));
            }
            if let Some(s) = si.and_then(|k| rec.get(k)) {
                source = match s.trim() {
                    "model" => PanelSource::Model,
                    "empirical" => PanelSource::Empirical,
                    other => {
                        return Err(AnalysisError::PanelFormat(format!(
                            "line {line}: source {other:?}"
                        )))
                    }
                };
            }
            let i = match codes.iter().position(|c| *c == code) {
                Some(i) => i,
                None => {
                    codes.push(code);
                    codes.len() - 1
                }
            };
            if cells.insert((i, month), value).is_some() {
                return Err(AnalysisError::PanelFormat(format!(
                    "line {line}: duplicate entry"
                )));
            }
        }
        let mut months: Vec<(i32, u32)> = cells.keys().map(|(_, m)| *m).collect();
        months.sort();
        months.dedup();
        let mut values = DMatrix::zeros(codes.len(), months.len());
        for (i, code) in codes.iter().enumerate() {
            for (t, m) in months.iter().enumerate() {
                values[(i, t)] = *cells.get(&(i, *m)).ok_or_else(|| {
                    AnalysisError::PanelFormat(format!("{code} missing {}", format_month(*m)))
                })?;
            }
        }
        Ok(MonthlyPanel {
            industry_codes: codes,
            months,
            values,
            source,
        })
    }
}

/// Per-industry weights normalised to one, looked up by code.
fn weight_map(codes: &[String], weights: &[f64]) -> Result<HashMap<String, f64>> {
    if codes.len() != weights.len() {
        return Err(AnalysisError::PanelMismatch(format!(
            "{} weights for {} industries",
            weights.len(),
            codes.len()
        )));
    }
    Ok(codes.iter().cloned().zip(weights.iter().copied()).collect())
}

/// The industries both panels cover (in `model` order) with normalised
/// weights, and for each requested month the column in each panel.
struct Aligned {
    rows: Vec<(usize, usize, f64)>,
    cols: Vec<(usize, usize)>,
}

fn align(
    model: &MonthlyPanel,
    data: &MonthlyPanel,
    codes: &[String],
    weights: &[f64],
    months: &[(i32, u32)],
) -> Result<Aligned> {
    if months.is_empty() {
        return Err(AnalysisError::PanelMismatch("no months to compare".into()));
    }
    let w = weight_map(codes, weights)?;
    let mut rows = Vec::new();
    for (i, code) in model.industry_codes.iter().enumerate() {
        if let (Some(k), Some(&wi)) = (
            data.industry_codes.iter().position(|c| c == code),
            w.get(code),
        ) {
            if !(wi.is_finite() && wi >= 0.0) {
                return Err(AnalysisError::PanelMismatch(format!(
                    "bad weight for {code}"
                )));
            }
            rows.push((i, k, wi));
        }
    }
    let total: f64 = rows.iter().map(|r| r.2).sum();
    if rows.is_empty() || total <= 0.0 {
        return Err(AnalysisError::PanelMismatch(
            "panels share no weighted industry".into(),
        ));
    }
    for r in &mut rows {
        r.2 /= total;
    }
    let find = |p: &MonthlyPanel, m: (i32, u32)| {
        p.months.iter().position(|x| *x == m).ok_or_else(|| {
            AnalysisError::PanelMismatch(format!(
                "{} panel lacks {}",
                p.source.name(),
                format_month(m)
            ))
        })
    };
    let cols = months
        .iter()
        .map(|&m| Ok((find(model, m)?, find(data, m)?)))
        .collect::<Result<_>>()?;
    Ok(Aligned { rows, cols })
}

/// Output-weighted mean absolute gap between model and data, in percentage
/// points, averaged over `months`.
///
/// `weights` are steady-state outputs keyed by `codes`; only industries in
/// both panels count and their weights are renormalised.
pub fn afe_sectoral(
    model: &MonthlyPanel,
    data: &MonthlyPanel,
    codes: &[String],
    weights: &[f64],
    months: &[(i32, u32)],
) -> Result<f64> {
    let al = align(model, data, codes, weights, months)?;
    let mut sum = 0.0;
    for &(tm, td) in &al.cols {
        for &(i, k, w) in &al.rows {
            sum += w * (data.values[(k, td)] - model.values[(i, tm)]).abs();
        }
    }
    Ok(sum / al.cols.len() as f64)
}

/// Signed gap in aggregate output, data minus model, in percent of the base
/// month aggregate, averaged over `months`. Positive when the model is too
/// pessimistic.
pub fn afe_aggregate(
    model: &MonthlyPanel,
    data: &MonthlyPanel,
    codes: &[String],
    weights: &[f64],
    months: &[(i32, u32)],
) -> Result<f64> {
    let al = align(model, data, codes, weights, months)?;
    let mut sum = 0.0;
    for &(tm, td) in &al.cols {
        for &(i, k, w) in &al.rows {
            sum += w * (data.values[(k, td)] - model.values[(i, tm)]);
        }
    }
    Ok(sum / al.cols.len() as f64)
}
