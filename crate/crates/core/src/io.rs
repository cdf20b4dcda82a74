//! CSV readers and writers for the input data sets.
//!
//! Every writer emits floats in their shortest round-trip form, so reading a
//! written file gives back identical values.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Read, Write};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::econ::{IoTable, SurveyRecord};
use crate::shocks::IndustryAttributes;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}, column {column:?}: cannot parse {value:?}")]
    Parse {
        line: usize,
        column: String,
        value: String,
    },
    #[error("bad header: {0}")]
    Header(String),
    #[error("{0}")]
    Shape(String),
    #[error("unknown industry code {0:?}")]
    UnknownCode(String),
    #[error("no value for industry {0:?}")]
    MissingCode(String),
}

pub type Result<T> = std::result::Result<T, IoError>;

fn is_na(s: &str) -> bool {
    matches!(s.trim(), "" | "NA" | "NaN" | "nan")
}

fn parse_f64(s: &str, line: usize, column: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| IoError::Parse {
        line,
        column: column.to_string(),
        value: s.to_string(),
    })
}

fn column(header: &csv::StringRecord, name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| IoError::Header(format!("missing column {name:?}")))
}

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else {
        v.to_string()
    }
}

/// Reads a square input-output table: one row per supplier with columns
/// `<code>, <user codes...>, c, <final demand categories...>, l[, x]`.
pub fn read_io_table<R: Read>(r: R) -> Result<IoTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let h: Vec<String> = header.iter().map(|s| s.trim().to_string()).collect();
    let p = column(&header, "c")?;
    let q = column(&header, "l")?;
    if p < 1 || q <= p {
        return Err(IoError::Header(
            "expected user codes, then c, categories and l".into(),
        ));
    }
    let has_x = match &h[q + 1..] {
        [] => false,
        [x] if x == "x" => true,
        _ => return Err(IoError::Header("only x may follow l".into())),
    };
    let codes: Vec<String> = h[1..p].to_vec();
    let categories: Vec<String> = h[p + 1..q].to_vec();
    let n = codes.len();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        if k >= n {
            return Err(IoError::Shape(format!(
                "more supplier rows than the {n} user columns"
            )));
        }
        if rec.get(0).map(str::trim) != Some(codes[k].as_str()) {
            return Err(IoError::Shape(format!(
                "line {line}: supplier {:?} does not match column {:?}",
                rec.get(0).unwrap_or(""),
                codes[k]
            )));
        }
        if rec.len() != h.len() {
            return Err(IoError::Shape(format!(
                "line {line}: {} fields, header has {}",
                rec.len(),
                h.len()
            )));
        }
        rows.push(
            (1..h.len())
                .map(|c| parse_f64(&rec[c], line, &h[c]))
                .collect::<Result<_>>()?,
        );
    }
    if rows.len() != n {
        return Err(IoError::Shape(format!(
            "{} supplier rows for {n} user columns",
            rows.len()
        )));
    }
    let at = |i: usize, c: usize| rows[i][c - 1];
    Ok(IoTable {
        industry_codes: codes,
        z: DMatrix::from_fn(n, n, |j, i| at(j, 1 + i)),
        c: DVector::from_fn(n, |i, _| at(i, p)),
        f: DMatrix::from_fn(n, categories.len(), |i, k| at(i, p + 1 + k)),
        f_categories: categories,
        l: DVector::from_fn(n, |i, _| at(i, q)),
        x: has_x.then(|| DVector::from_fn(n, |i, _| at(i, q + 1))),
    })
}

pub fn write_io_table<W: Write>(t: &IoTable, w: W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["code".to_string()];
    header.extend(t.industry_codes.iter().cloned());
    header.push("c".into());
    header.extend(t.f_categories.iter().cloned());
    header.push("l".into());
    if t.x.is_some() {
        header.push("x".into());
    }
    out.write_record(&header)?;
    for (j, code) in t.industry_codes.iter().enumerate() {
        let mut row = vec![code.clone()];
        row.extend(t.z.row(j).iter().map(f64::to_string));
        row.push(t.c[j].to_string());
        row.extend(t.f.row(j).iter().map(f64::to_string));
        row.push(t.l[j].to_string());
        if let Some(x) = &t.x {
            row.push(x[j].to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()
}

/// Long-form analyst ratings `input_code, industry_code, analyst_id, rating`.
/// `NA` or an absent row means no answer. Returns one matrix per analyst,
/// ordered by analyst id.
pub fn read_ratings<R: Read>(r: R, codes: &[String]) -> Result<Vec<DMatrix<Option<f64>>>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let (ci, ii, ai, ri) = (
        column(&header, "input_code")?,
        column(&header, "industry_code")?,
        column(&header, "analyst_id")?,
        column(&header, "rating")?,
    );
    let index: HashMap<&str, usize> = codes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let n = codes.len();
    let mut per: BTreeMap<String, DMatrix<Option<f64>>> = BTreeMap::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let lookup = |c: usize| {
            let code = rec.get(c).unwrap_or("").trim();
            index
                .get(code)
                .copied()
                .ok_or_else(|| IoError::UnknownCode(code.to_string()))
        };
        let (j, i) = (lookup(ci)?, lookup(ii)?);
        let raw = rec.get(ri).unwrap_or("");
        let value = if is_na(raw) {
            None
        } else {
            Some(parse_f64(raw, line, "rating")?)
        };
        let m = per
            .entry(rec.get(ai).unwrap_or("").trim().to_string())
            .or_insert_with(|| DMatrix::from_element(n, n, None));
        m[(j, i)] = value;
    }
    Ok(per.into_values().collect())
}

/// Writes answered cells plus explicit `NA` for cells an analyst skipped
/// where some other analyst answered.
pub fn write_ratings<W: Write>(
    codes: &[String],
    per_analyst: &[DMatrix<Option<f64>>],
    w: W,
) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["input_code", "industry_code", "analyst_id", "rating"])?;
    let n = codes.len();
    for i in 0..n {
        for j in 0..n {
            if per_analyst.iter().all(|m| m[(j, i)].is_none()) {
                continue;
            }
            for (a, m) in per_analyst.iter().enumerate() {
                let v = m[(j, i)].map_or("NA".to_string(), |v| v.to_string());
                out.write_record([
                    codes[j].as_str(),
                    codes[i].as_str(),
                    &format!("a{}", a + 1),
                    &v,
                ])?;
            }
        }
    }
    out.flush()
}

/// `industry_code, year, begin_stock, end_stock, turnover`; `NA` marks gaps.
pub fn read_survey<R: Read>(r: R) -> Result<Vec<SurveyRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let cols = [
        "industry_code",
        "year",
        "begin_stock",
        "end_stock",
        "turnover",
    ]
    .map(|c| column(&header, c))
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let num = |c: usize, name: &str| {
            let s = rec.get(cols[c]).unwrap_or("");
            if is_na(s) {
                Ok(f64::NAN)
            } else {
                parse_f64(s, line, name)
            }
        };
        let year_s = rec.get(cols[1]).unwrap_or("");
        out.push(SurveyRecord {
            industry_code: rec.get(cols[0]).unwrap_or("").trim().to_string(),
            year: year_s.trim().parse().map_err(|_| IoError::Parse {
                line,
                column: "year".into(),
                value: year_s.to_string(),
            })?,
            begin_stock: num(2, "begin_stock")?,
            end_stock: num(3, "end_stock")?,
            turnover: num(4, "turnover")?,
        });
    }
    Ok(out)
}

pub fn write_survey<W: Write>(records: &[SurveyRecord], w: W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "industry_code",
        "year",
        "begin_stock",
        "end_stock",
        "turnover",
    ])?;
    for r in records {
        out.write_record([
            r.industry_code.clone(),
            r.year.to_string(),
            fmt_opt(r.begin_stock),
            fmt_opt(r.end_stock),
            fmt_opt(r.turnover),
        ])?;
    }
    out.flush()
}

/// One numeric column keyed by `industry_code`, in file order.
pub fn read_vector<R: Read>(r: R, name: &str) -> Result<(Vec<String>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let (ci, vi) = (column(&header, "industry_code")?, column(&header, name)?);
    let mut codes = Vec::new();
    let mut values = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        codes.push(rec.get(ci).unwrap_or("").trim().to_string());
        values.push(parse_f64(rec.get(vi).unwrap_or(""), k + 2, name)?);
    }
    Ok((codes, values))
}

pub fn write_vector<W: Write>(
    codes: &[String],
    name: &str,
    values: &[f64],
    w: W,
) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["industry_code", name])?;
    for (c, v) in codes.iter().zip(values) {
        out.write_record([c.as_str(), &v.to_string()])?;
    }
    out.flush()
}

/// Reorders `(codes, values)` to `target`; every target code must be present.
pub fn align_vector(codes: &[String], values: &[f64], target: &[String]) -> Result<Vec<f64>> {
    let pos: HashMap<&str, usize> = codes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    target
        .iter()
        .map(|t| {
            pos.get(t.as_str())
                .map(|&i| values[i])
                .ok_or_else(|| IoError::MissingCode(t.clone()))
        })
        .collect()
}

/// `industry_code, rli, ess, ppi, eps_d`; other columns are ignored.
pub fn read_attributes<R: Read>(r: R) -> Result<IndustryAttributes> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let names = ["rli", "ess", "ppi", "eps_d"];
    let ci = column(&header, "industry_code")?;
    let vi = names
        .map(|c| column(&header, c))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut a = IndustryAttributes {
        industry_codes: Vec::new(),
        rli: Vec::new(),
        ess: Vec::new(),
        ppi: Vec::new(),
        eps_d_lockdown: Vec::new(),
    };
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let v = |c: usize| parse_f64(rec.get(vi[c]).unwrap_or(""), line, names[c]);
        a.industry_codes
            .push(rec.get(ci).unwrap_or("").trim().to_string());
        a.rli.push(v(0)?);
        a.ess.push(v(1)?);
        a.ppi.push(v(2)?);
        a.eps_d_lockdown.push(v(3)?);
    }
    Ok(a)
}

pub fn write_attributes<W: Write>(a: &IndustryAttributes, w: W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["industry_code", "rli", "ess", "ppi", "eps_d"])?;
    for i in 0..a.n() {
        out.write_record([
            a.industry_codes[i].clone(),
            a.rli[i].to_string(),
            a.ess[i].to_string(),
            a.ppi[i].to_string(),
            a.eps_d_lockdown[i].to_string(),
        ])?;
    }
    out.flush()
}

/// `source_code, target_code` pairs.
pub fn read_crosswalk<R: Read>(r: R) -> Result<Vec<(String, String)>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let (si, ti) = (
        column(&header, "source_code")?,
        column(&header, "target_code")?,
    );
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.push((
            rec.get(si).unwrap_or("").trim().to_string(),
            rec.get(ti).unwrap_or("").trim().to_string(),
        ));
    }
    Ok(out)
}

/// `source_code, weight`.
pub fn read_weights<R: Read>(r: R) -> Result<(Vec<String>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let (si, wi) = (column(&header, "source_code")?, column(&header, "weight")?);
    let mut codes = Vec::new();
    let mut weights = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        codes.push(rec.get(si).unwrap_or("").trim().to_string());
        weights.push(parse_f64(rec.get(wi).unwrap_or(""), k + 2, "weight")?);
    }
    Ok((codes, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy;

    #[test]
    fn io_table_round_trip() {
        let t = toy::generate(toy::DEFAULT_SEED).table;
        let mut buf = Vec::new();
        write_io_table(&t, &mut buf).unwrap();
        let back = read_io_table(buf.as_slice()).unwrap();
        assert_eq!(back.industry_codes, t.industry_codes);
        assert_eq!(back.z, t.z);
        assert_eq!(back.f, t.f);
        assert_eq!(back.f_categories, t.f_categories);
        assert_eq!(back.c, t.c);
        assert_eq!(back.l, t.l);
        assert_eq!(back.x, t.x);
    }

    #[test]
    fn io_table_without_output_column() {
        let csv = "code,A,B,c,export,l\nA,0,10,85,5,40\nB,5,0,80,0,30\n";
        let t = read_io_table(csv.as_bytes()).unwrap();
        assert_eq!(t.z[(0, 1)], 10.0);
        assert_eq!(t.f_categories, vec!["export".to_string()]);
        assert!(t.x.is_none());
    }

    #[test]
    fn io_table_shape_errors() {
        let swapped = "code,A,B,c,l\nB,0,1,1,1\nA,0,1,1,1\n";
        assert!(matches!(
            read_io_table(swapped.as_bytes()),
            Err(IoError::Shape(_))
        ));
        let short = "code,A,B,c,l\nA,0,1,1,1\n";
        assert!(matches!(
            read_io_table(short.as_bytes()),
            Err(IoError::Shape(_))
        ));
        let junk = "code,A,c,l\nA,x,1,1\n";
        assert!(matches!(
            read_io_table(junk.as_bytes()),
            Err(IoError::Parse { .. })
        ));
        let no_c = "code,A,l\nA,1,1\n";
        assert!(matches!(
            read_io_table(no_c.as_bytes()),
            Err(IoError::Header(_))
        ));
    }

    #[test]
    fn ratings_round_trip_with_gaps() {
        let d = toy::generate(toy::DEFAULT_SEED);
        let mut buf = Vec::new();
        write_ratings(&d.table.industry_codes, &d.analyst_ratings, &mut buf).unwrap();
        let back = read_ratings(buf.as_slice(), &d.table.industry_codes).unwrap();
        assert_eq!(back, d.analyst_ratings);
    }

    #[test]
    fn ratings_reject_unknown_codes() {
        let csv = "input_code,industry_code,analyst_id,rating\nZZ,A,1,1\n";
        let codes = vec!["A".to_string()];
        assert!(
            matches!(read_ratings(csv.as_bytes(), &codes), Err(IoError::UnknownCode(c)) if c == "ZZ")
        );
    }

    #[test]
    fn survey_round_trip_keeps_gaps() {
        let d = toy::generate(toy::DEFAULT_SEED);
        let mut buf = Vec::new();
        write_survey(&d.survey, &mut buf).unwrap();
        let back = read_survey(buf.as_slice()).unwrap();
        assert_eq!(back.len(), d.survey.len());
        for (a, b) in back.iter().zip(&d.survey) {
            assert_eq!(a.industry_code, b.industry_code);
            assert_eq!(a.year, b.year);
            for (x, y) in [
                (a.begin_stock, b.begin_stock),
                (a.end_stock, b.end_stock),
                (a.turnover, b.turnover),
            ] {
                assert!(x == y || (x.is_nan() && y.is_nan()));
            }
        }
    }

    #[test]
    fn attributes_and_vectors_round_trip() {
        let d = toy::generate(toy::DEFAULT_SEED);
        let mut buf = Vec::new();
        write_attributes(&d.attributes, &mut buf).unwrap();
        assert_eq!(read_attributes(buf.as_slice()).unwrap(), d.attributes);

        let mut buf = Vec::new();
        write_vector(&d.table.industry_codes, "eps_s", &d.s5, &mut buf).unwrap();
        let (codes, v) = read_vector(buf.as_slice(), "eps_s").unwrap();
        assert_eq!(v, d.s5);
        let mut rev = codes.clone();
        rev.reverse();
        let aligned = align_vector(&codes, &v, &rev).unwrap();
        assert_eq!(aligned[0], d.s5[4]);
        assert!(matches!(
            align_vector(&codes, &v, &["Q".to_string()]),
            Err(IoError::MissingCode(_))
        ));
    }

    #[test]
    fn crosswalk_and_weights() {
        let cw = "source_code,target_code\n111,A01\n112,A01\n";
        assert_eq!(read_crosswalk(cw.as_bytes()).unwrap().len(), 2);
        let w = "source_code,weight\n111,2.5\n112,1\n";
        assert_eq!(read_weights(w.as_bytes()).unwrap().1, vec![2.5, 1.0]);
    }
}
