use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{Datelike, NaiveDate};
use nalgebra::{DMatrix, DVector};

use super::DayRecord;
use crate::production::InputBound;

/// Full daily history of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub industry_codes: Vec<String>,
    pub start: NaiveDate,
    pub x0: DVector<f64>,
    pub records: Vec<DayRecord>,
}

/// Calendar-month means of daily gross output.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyMeans {
    /// `(year, month)` in chronological order.
    pub months: Vec<(i32, u32)>,
    /// Industry by month.
    pub values: DMatrix<f64>,
}

const HEADER: [&str; 22] = [
    "day",
    "date",
    "industry_code",
    "x0",
    "x",
    "d",
    "c",
    "f",
    "cd",
    "fd",
    "l",
    "xcap",
    "xinp",
    "l_eff",
    "cd_total",
    "xi",
    "agg_eps",
    "xinp_binding",
    "nc_binding",
    "agg_x",
    "agg_c",
    "agg_l",
];

#[derive(Debug, thiserror::Error)]
pub enum TrajectoryReadError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("bad value in column {column} on line {line}: {value:?}")]
    Parse {
        column: &'static str,
        line: usize,
        value: String,
    },
    #[error("malformed trajectory: {0}")]
    Shape(String),
}

impl Trajectory {
    pub fn n_industries(&self) -> usize {
        self.industry_codes.len()
    }

    pub fn date(&self, day: usize) -> NaiveDate {
        self.start + chrono::Days::new(day as u64)
    }

    pub fn aggregate_output(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.x.sum()).collect()
    }

    /// Aggregate output relative to steady state, per day.
    pub fn aggregate_output_fraction(&self) -> Vec<f64> {
        let base = self.x0.sum();
        self.records.iter().map(|r| r.x.sum() / base).collect()
    }

    pub fn aggregate_consumption(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.c.sum()).collect()
    }

    pub fn monthly_means(&self) -> MonthlyMeans {
        let mut sums: BTreeMap<(i32, u32), (DVector<f64>, usize)> = BTreeMap::new();
        for r in &self.records {
            let d = self.date(r.day);
            let e = sums
                .entry((d.year(), d.month()))
                .or_insert_with(|| (DVector::zeros(self.n_industries()), 0));
            e.0 += &r.x;
            e.1 += 1;
        }
        let months: Vec<(i32, u32)> = sums.keys().copied().collect();
        let mut values = DMatrix::zeros(self.n_industries(), months.len());
        for (k, (sum, count)) in sums.values().enumerate() {
            values.set_column(k, &(sum / *count as f64));
        }
        MonthlyMeans { months, values }
    }

    /// Long-form CSV, one row per day and industry. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(HEADER)?;
        for r in &self.records {
            let date = self.date(r.day).to_string();
            let day = r.day.to_string();
            let scalars = [
                r.l_eff.to_string(),
                r.cd_total.to_string(),
                r.xi.to_string(),
                r.agg_eps.to_string(),
                r.xinp_binding.to_string(),
                r.nc_binding.to_string(),
                r.x.sum().to_string(),
                r.c.sum().to_string(),
                r.l.sum().to_string(),
            ];
            for (i, code) in self.industry_codes.iter().enumerate() {
                let mut row = vec![
                    day.clone(),
                    date.clone(),
                    code.clone(),
                    self.x0[i].to_string(),
                    r.x[i].to_string(),
                    r.d[i].to_string(),
                    r.c[i].to_string(),
                    r.f[i].to_string(),
                    r.cd[i].to_string(),
                    r.fd[i].to_string(),
                    r.l[i].to_string(),
                    r.xcap[i].to_string(),
                    r.xinp[i].to_string(),
                ];
                row.extend(scalars.iter().cloned());
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Inverse of [`Trajectory::write_csv`].
    pub fn read_csv<R: Read>(r: R) -> Result<Trajectory, TrajectoryReadError> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        if header.iter().ne(HEADER.iter().copied()) {
            return Err(TrajectoryReadError::Shape("unexpected header".into()));
        }
        let mut codes: Vec<String> = Vec::new();
        let mut x0: Vec<f64> = Vec::new();
        let mut start = None;
        let mut records: Vec<DayRecord> = Vec::new();
        let mut cols: Vec<[f64; 8]> = Vec::new();
        let mut xinp: Vec<InputBound> = Vec::new();
        let mut current: Option<(usize, [String; 6])> = None;

        let flush = |day: usize,
                     scalars: &[String; 6],
                     cols: &mut Vec<[f64; 8]>,
                     xinp: &mut Vec<InputBound>,
                     records: &mut Vec<DayRecord>|
         -> Result<(), TrajectoryReadError> {
            let n = cols.len();
            let col = |k: usize| DVector::from_iterator(n, cols.iter().map(|c| c[k]));
            let p = |k: usize, name: &'static str| {
                scalars[k]
                    .parse::<f64>()
                    .map_err(|_| TrajectoryReadError::Parse {
                        column: name,
                        line: 0,
                        value: scalars[k].clone(),
                    })
            };
            let u = |k: usize, name: &'static str| {
                scalars[k]
                    .parse::<usize>()
                    .map_err(|_| TrajectoryReadError::Parse {
                        column: name,
                        line: 0,
                        value: scalars[k].clone(),
                    })
            };
            records.push(DayRecord {
                day,
                x: col(0),
                d: col(1),
                c: col(2),
                f: col(3),
                cd: col(4),
                fd: col(5),
                l: col(6),
                xcap: col(7),
                xinp: std::mem::take(xinp),
                l_eff: p(0, "l_eff")?,
                cd_total: p(1, "cd_total")?,
                xi: p(2, "xi")?,
                agg_eps: p(3, "agg_eps")?,
                xinp_binding: u(4, "xinp_binding")?,
                nc_binding: u(5, "nc_binding")?,
            });
            cols.clear();
            Ok(())
        };

        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = line + 2;
            let field = |k: usize| rec.get(k).unwrap_or("");
            let num = |k: usize| {
                field(k)
                    .parse::<f64>()
                    .map_err(|_| TrajectoryReadError::Parse {
                        column: HEADER[k],
                        line,
                        value: field(k).to_string(),
                    })
            };
            let day: usize = field(0).parse().map_err(|_| TrajectoryReadError::Parse {
                column: "day",
                line,
                value: field(0).to_string(),
            })?;
            if start.is_none() {
                let date: NaiveDate = field(1).parse().map_err(|_| TrajectoryReadError::Parse {
                    column: "date",
                    line,
                    value: field(1).to_string(),
                })?;
                start = Some(date - chrono::Days::new(day as u64));
            }
            if let Some((prev, scalars)) = &current {
                if *prev != day {
                    flush(*prev, scalars, &mut cols, &mut xinp, &mut records)?;
                    current = None;
                }
            }
            if records.is_empty() {
                codes.push(field(2).to_string());
                x0.push(num(3)?);
            }
            let mut row = [0.0; 8];
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = num(4 + k)?;
            }
            cols.push(row);
            xinp.push(field(12).parse().map_err(|_| TrajectoryReadError::Parse {
                column: "xinp",
                line,
                value: field(12).to_string(),
            })?);
            if current.is_none() {
                current = Some((day, std::array::from_fn(|k| field(13 + k).to_string())));
            }
        }
        if let Some((day, scalars)) = &current {
            flush(*day, scalars, &mut cols, &mut xinp, &mut records)?;
        }
        let n = codes.len();
        if records.iter().any(|r| r.x.len() != n) {
            return Err(TrajectoryReadError::Shape(
                "days list different industry counts".into(),
            ));
        }
        Ok(Trajectory {
            industry_codes: codes,
            start: start.unwrap_or_default(),
            x0: DVector::from_vec(x0),
            records,
        })
    }
}
