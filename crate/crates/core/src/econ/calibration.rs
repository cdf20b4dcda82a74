use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use super::{CriticalityMatrix, EconError, Economy, Result, CRITICAL, IMPORTANT, NON_CRITICAL};

/// One yearly inventory observation. Missing values are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRecord {
    pub industry_code: String,
    pub year: i32,
    pub begin_stock: f64,
    pub end_stock: f64,
    pub turnover: f64,
}

impl SurveyRecord {
    fn is_missing(&self) -> bool {
        !(self.begin_stock.is_finite() && self.end_stock.is_finite() && self.turnover.is_finite())
    }
}

/// Inventory targets in days of coverage from yearly stock/turnover data.
///
/// Each year contributes `365 * mean_stock / turnover`, weighted by
/// `decay^(max_year - year)` where `max_year` is the latest year present in
/// the whole survey. Source industries are mapped onto model industries via
/// `source_to_model` (identity when `None`) and combined with weights equal
/// to their decay-weighted mean turnover. Model industries without data get
/// the mean target of the service industries that do have data, or the mean
/// over all covered industries if no service industry is covered.
pub fn inventory_targets_from_survey(
    records: &[SurveyRecord],
    model_codes: &[String],
    source_to_model: Option<&HashMap<String, String>>,
    decay: f64,
    service_codes: &[String],
) -> Result<DVector<f64>> {
    let index: HashMap<&str, usize> = model_codes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let valid: Vec<&SurveyRecord> = records.iter().filter(|r| !r.is_missing()).collect();
    for r in &valid {
        if r.turnover <= 0.0 {
            return Err(EconError::NonPositiveTurnover {
                year: r.year,
                industry: r.industry_code.clone(),
            });
        }
    }
    let Some(max_year) = valid.iter().map(|r| r.year).max() else {
        return Err(EconError::NoDataAnywhere);
    };

    // source -> (sum w*ratio, sum w*turnover, sum w)
    let mut per_source: BTreeMap<&str, (f64, f64, f64)> = BTreeMap::new();
    for r in &valid {
        let w = decay.powi(max_year - r.year);
        let ratio = 365.0 * 0.5 * (r.begin_stock + r.end_stock) / r.turnover;
        let e = per_source
            .entry(r.industry_code.as_str())
            .or_insert((0.0, 0.0, 0.0));
        e.0 += w * ratio;
        e.1 += w * r.turnover;
        e.2 += w;
    }

    let n = model_codes.len();
    let mut num = vec![0.0; n];
    let mut den = vec![0.0; n];
    for (source, (wr, wt, w)) in per_source {
        let target = match source_to_model {
            Some(map) => map.get(source).map(String::as_str),
            None => Some(source),
        };
        let Some(&i) = target.and_then(|t| index.get(t)) else {
            return Err(EconError::UnknownSourceIndustry(source.to_string()));
        };
        let ratio = wr / w;
        let turnover = wt / w;
        num[i] += turnover * ratio;
        den[i] += turnover;
    }

    let covered: Vec<Option<f64>> = (0..n)
        .map(|i| (den[i] > 0.0).then(|| num[i] / den[i]))
        .collect();
    let mean_over = |codes: &mut dyn Iterator<Item = usize>| {
        let vals: Vec<f64> = codes.filter_map(|i| covered[i]).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    let fill = mean_over(
        &mut service_codes
            .iter()
            .filter_map(|c| index.get(c.as_str()).copied()),
    )
    .or_else(|| mean_over(&mut (0..n)))
    .ok_or(EconError::NoDataAnywhere)?;
    Ok(DVector::from_iterator(
        n,
        covered.into_iter().map(|v| v.unwrap_or(fill)),
    ))
}

/// Combines analysts' ratings cell by cell.
///
/// The mean of the available ratings is rounded to 1 when at least 2/3, to 0
/// when at most 1/3 and to 0.5 otherwise. Cells nobody rated become 0. The
/// thresholds are evaluated on integer half-unit counts so ties are exact.
pub fn aggregate_ratings(per_analyst: &[DMatrix<Option<f64>>]) -> Result<CriticalityMatrix> {
    let first = per_analyst.first().ok_or(EconError::EmptyInput)?;
    let (rows, cols) = first.shape();
    if rows != cols {
        return Err(EconError::DimensionMismatch(format!(
            "rating matrix is {rows}x{cols}"
        )));
    }
    let mut out = DMatrix::from_element(rows, cols, NON_CRITICAL);
    for m in per_analyst {
        if m.shape() != (rows, cols) {
            return Err(EconError::DimensionMismatch(
                "rating matrices differ in shape".into(),
            ));
        }
    }
    for i in 0..cols {
        for j in 0..rows {
            let mut halves = 0u32;
            let mut count = 0u32;
            for m in per_analyst {
                if let Some(v) = m[(j, i)] {
                    halves += match v {
                        x if x == NON_CRITICAL => 0,
                        x if x == IMPORTANT => 1,
                        x if x == CRITICAL => 2,
                        value => {
                            return Err(EconError::InvalidRating {
                                input: j,
                                industry: i,
                                value,
                            })
                        }
                    };
                    count += 1;
                }
            }
            // mean = halves / (2 count)
            out[(j, i)] = if count == 0 || 3 * halves <= 2 * count {
                NON_CRITICAL
            } else if 3 * halves >= 4 * count {
                CRITICAL
            } else {
                IMPORTANT
            };
        }
    }
    CriticalityMatrix::new(out)
}

/// Weighted aggregation of a source-classification vector onto targets.
///
/// A source mapped to `k` targets contributes weight `w / k` to each.
/// Returns one value per entry of `targets`.
pub fn crosswalk_aggregate(
    sources: &[String],
    values: &[f64],
    weights: &[f64],
    mapping: &[(String, String)],
    targets: &[String],
) -> Result<Vec<f64>> {
    if values.len() != sources.len() || weights.len() != sources.len() {
        return Err(EconError::DimensionMismatch(format!(
            "{} sources, {} values, {} weights",
            sources.len(),
            values.len(),
            weights.len()
        )));
    }
    if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
        return Err(EconError::NegativeWeight(sources[i].clone()));
    }
    let src_index: HashMap<&str, usize> = sources
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let tgt_index: HashMap<&str, usize> = targets
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut fanout = vec![0usize; sources.len()];
    for (s, _) in mapping {
        let &si = src_index
            .get(s.as_str())
            .ok_or_else(|| EconError::UnknownSourceIndustry(s.clone()))?;
        fanout[si] += 1;
    }

    let mut num = vec![0.0; targets.len()];
    let mut den = vec![0.0; targets.len()];
    let mut touched = vec![false; targets.len()];
    for (s, t) in mapping {
        let si = src_index[s.as_str()];
        let &ti = tgt_index
            .get(t.as_str())
            .ok_or_else(|| EconError::UnmappedTarget(t.clone()))?;
        let w = weights[si] / fanout[si] as f64;
        num[ti] += w * values[si];
        den[ti] += w;
        touched[ti] = true;
    }
    targets
        .iter()
        .enumerate()
        .map(|(ti, code)| {
            if !touched[ti] {
                Err(EconError::UnmappedTarget(code.clone()))
            } else if den[ti] <= 0.0 {
                Err(EconError::ZeroWeightTarget(code.clone()))
            } else {
                Ok(num[ti] / den[ti])
            }
        })
        .collect()
}

/// Share of labor income spent on domestic final consumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propensity {
    /// `min(raw, 1)`.
    pub value: f64,
    /// Unclamped ratio of total consumption to total labor income.
    pub raw: f64,
}

impl Propensity {
    pub fn was_clamped(&self) -> bool {
        self.raw > 1.0
    }
}

pub fn propensity_to_consume(econ: &Economy) -> Result<Propensity> {
    let labor = econ.l0.sum();
    if labor <= 0.0 {
        return Err(EconError::ZeroLaborIncome);
    }
    let raw = econ.c0.sum() / labor;
    if raw > 1.0 {
        log::warn!("consumption exceeds labor income (m = {raw}); clamping to 1");
    }
    Ok(Propensity {
        value: raw.min(1.0),
        raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::{validate_economy, IoTable, DEFAULT_MARKET_CLEARING_TOL};
    use proptest::prelude::*;

    fn rec(code: &str, year: i32, stock: f64, turnover: f64) -> SurveyRecord {
        SurveyRecord {
            industry_code: code.into(),
            year,
            begin_stock: stock,
            end_stock: stock,
            turnover,
        }
    }

    fn codes(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn constant_stock_single_year() {
        let n = inventory_targets_from_survey(
            &[rec("A", 2018, 10.0, 365.0)],
            &codes(&["A"]),
            None,
            0.95,
            &[],
        )
        .unwrap();
        assert_eq!(n[0], 10.0);
    }

    #[test]
    fn two_years_decay_weighted() {
        let recs = [rec("A", 2017, 10.0, 365.0), rec("A", 2018, 20.0, 365.0)];
        let n = inventory_targets_from_survey(&recs, &codes(&["A"]), None, 0.95, &[]).unwrap();
        let expected = (0.95 * 10.0 + 20.0) / 1.95;
        assert!((n[0] - expected).abs() < 1e-9);
        assert!((n[0] - 15.128).abs() < 1e-3);
    }

    #[test]
    fn missing_industry_gets_service_mean() {
        let recs = [
            rec("S1", 2018, 10.0, 365.0),
            rec("S2", 2018, 14.0, 365.0),
            rec("M", 2018, 40.0, 365.0),
        ];
        let n = inventory_targets_from_survey(
            &recs,
            &codes(&["M", "S1", "S2", "X"]),
            None,
            0.95,
            &codes(&["S1", "S2", "X"]),
        )
        .unwrap();
        assert_eq!(n[3], 12.0);
    }

    #[test]
    fn missing_years_carry_no_weight() {
        let mut gap = rec("A", 2017, f64::NAN, 365.0);
        gap.end_stock = f64::NAN;
        let recs = [gap, rec("A", 2018, 20.0, 365.0)];
        let n = inventory_targets_from_survey(&recs, &codes(&["A"]), None, 0.95, &[]).unwrap();
        assert_eq!(n[0], 20.0);
    }

    #[test]
    fn survey_errors() {
        assert_eq!(
            inventory_targets_from_survey(&[], &codes(&["A"]), None, 0.95, &[]).unwrap_err(),
            EconError::NoDataAnywhere
        );
        assert_eq!(
            inventory_targets_from_survey(
                &[rec("A", 2016, 1.0, 0.0)],
                &codes(&["A"]),
                None,
                0.95,
                &[]
            )
            .unwrap_err(),
            EconError::NonPositiveTurnover {
                year: 2016,
                industry: "A".into()
            }
        );
    }

    #[test]
    fn source_industries_combine_by_turnover() {
        let map: HashMap<String, String> = [
            ("10".to_string(), "C10".to_string()),
            ("11".to_string(), "C10".to_string()),
        ]
        .into();
        let recs = [
            rec("10", 2018, 10.0, 365.0),
            rec("11", 2018, 3.0 * 40.0, 3.0 * 365.0),
        ];
        let n =
            inventory_targets_from_survey(&recs, &codes(&["C10"]), Some(&map), 0.95, &[]).unwrap();
        // ratios 10 and 40 with turnover weights 1:3
        assert!((n[0] - 32.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn survey_scale_invariant(
            stocks in prop::collection::vec(1.0f64..100.0, 6),
            turnovers in prop::collection::vec(10.0f64..1000.0, 6),
            scale in 0.01f64..100.0,
        ) {
            let build = |k: f64| -> Vec<SurveyRecord> {
                (0..6).map(|i| SurveyRecord {
                    industry_code: ["A", "B"][i % 2].into(),
                    year: 2015 + (i / 2) as i32,
                    begin_stock: k * stocks[i],
                    end_stock: k * stocks[(i + 1) % 6],
                    turnover: k * turnovers[i],
                }).collect()
            };
            let c = codes(&["A", "B"]);
            let a = inventory_targets_from_survey(&build(1.0), &c, None, 0.95, &[]).unwrap();
            let b = inventory_targets_from_survey(&build(scale), &c, None, 0.95, &[]).unwrap();
            for i in 0..2 {
                prop_assert!((a[i] - b[i]).abs() <= 1e-9 * a[i]);
            }
        }
    }

    fn cell(vals: &[Option<f64>]) -> Vec<DMatrix<Option<f64>>> {
        vals.iter()
            .map(|v| DMatrix::from_row_slice(2, 2, &[Some(1.0), *v, Some(0.0), Some(1.0)]))
            .collect()
    }

    #[test]
    fn rating_thresholds() {
        let r = |v: &[Option<f64>]| aggregate_ratings(&cell(v)).unwrap().rating(0, 1);
        assert_eq!(r(&[Some(1.0), Some(1.0), Some(0.0)]), 1.0);
        assert_eq!(r(&[Some(0.0), Some(0.0), Some(1.0)]), 0.0);
        assert_eq!(r(&[Some(1.0), Some(0.0)]), 0.5);
        assert_eq!(r(&[None, None]), 0.0);
        assert_eq!(r(&[None, Some(0.5)]), 0.5);
    }

    #[test]
    fn rating_errors_and_diagonal() {
        assert_eq!(aggregate_ratings(&[]).unwrap_err(), EconError::EmptyInput);
        assert!(aggregate_ratings(&cell(&[Some(0.7)])).is_err());
        let zeros = vec![DMatrix::from_element(2, 2, Some(0.0))];
        let m = aggregate_ratings(&zeros).unwrap();
        assert!(m.is_critical(0, 0) && m.is_critical(1, 1));
    }

    proptest! {
        #[test]
        fn rating_aggregation_permutation_invariant(
            raw in prop::collection::vec(prop::collection::vec(0u8..4, 9), 1..6),
            rot in 0usize..6,
        ) {
            let to_m = |v: &Vec<u8>| DMatrix::from_iterator(3, 3, v.iter().map(|k| match k {
                0 => Some(0.0), 1 => Some(0.5), 2 => Some(1.0), _ => None,
            }));
            let mut ms: Vec<_> = raw.iter().map(to_m).collect();
            let a = aggregate_ratings(&ms).unwrap();
            let len = ms.len();
            ms.rotate_left(rot % len);
            ms.reverse();
            prop_assert_eq!(a, aggregate_ratings(&ms).unwrap());
        }
    }

    #[test]
    fn crosswalk_examples() {
        let one = crosswalk_aggregate(
            &codes(&["s"]),
            &[0.7],
            &[1.0],
            &[("s".into(), "t".into())],
            &codes(&["t"]),
        )
        .unwrap();
        assert_eq!(one, vec![0.7]);

        let two = crosswalk_aggregate(
            &codes(&["a", "b"]),
            &[1.0, 0.0],
            &[2.0, 2.0],
            &[("a".into(), "t".into()), ("b".into(), "t".into())],
            &codes(&["t"]),
        )
        .unwrap();
        assert_eq!(two, vec![0.5]);

        let split = crosswalk_aggregate(
            &codes(&["wide", "local"]),
            &[1.0, 0.0],
            &[3.0, 1.5],
            &[
                ("wide".into(), "t1".into()),
                ("wide".into(), "t2".into()),
                ("local".into(), "t1".into()),
            ],
            &codes(&["t1", "t2"]),
        )
        .unwrap();
        assert_eq!(split[0], (1.0 * 1.5 + 0.0 * 1.5) / 3.0);
        assert_eq!(split[1], 1.0);
    }

    #[test]
    fn crosswalk_errors() {
        let err = crosswalk_aggregate(
            &codes(&["a"]),
            &[1.0],
            &[1.0],
            &[("a".into(), "t".into())],
            &codes(&["t", "u"]),
        );
        assert_eq!(err.unwrap_err(), EconError::UnmappedTarget("u".into()));
        let err = crosswalk_aggregate(
            &codes(&["a"]),
            &[1.0],
            &[0.0],
            &[("a".into(), "t".into())],
            &codes(&["t"]),
        );
        assert_eq!(err.unwrap_err(), EconError::ZeroWeightTarget("t".into()));
    }

    proptest! {
        #[test]
        fn crosswalk_partition_preserves_weighted_total(
            vals in prop::collection::vec(0.0f64..1.0, 8),
            weights in prop::collection::vec(0.1f64..10.0, 8),
            assign in prop::collection::vec(0usize..3, 8),
        ) {
            let sources: Vec<String> = (0..8).map(|i| format!("s{i}")).collect();
            // every target gets at least one source
            let mut assign = assign;
            assign[0] = 0; assign[1] = 1; assign[2] = 2;
            let targets = codes(&["t0", "t1", "t2"]);
            let mapping: Vec<(String, String)> =
                (0..8).map(|i| (sources[i].clone(), targets[assign[i]].clone())).collect();
            let out = crosswalk_aggregate(&sources, &vals, &weights, &mapping, &targets).unwrap();
            let mut tw = [0.0; 3];
            for i in 0..8 { tw[assign[i]] += weights[i]; }
            let lhs: f64 = (0..3).map(|t| out[t] * tw[t]).sum();
            let rhs: f64 = (0..8).map(|i| vals[i] * weights[i]).sum();
            prop_assert!((lhs - rhs).abs() < 1e-9 * rhs.max(1.0));
        }
    }

    fn econ_with(c: &[f64], l: &[f64]) -> Economy {
        let n = c.len();
        let t = IoTable {
            industry_codes: (0..n).map(|i| format!("I{i}")).collect(),
            z: DMatrix::zeros(n, n),
            c: DVector::from_row_slice(c),
            f: DMatrix::zeros(n, 0),
            f_categories: vec![],
            l: DVector::from_row_slice(l),
            x: None,
        };
        validate_economy(
            &t,
            DVector::zeros(n),
            CriticalityMatrix::all_critical(n),
            DEFAULT_MARKET_CLEARING_TOL,
        )
        .unwrap()
    }

    #[test]
    fn propensity_examples() {
        let p = propensity_to_consume(&econ_with(&[40.0, 42.0], &[50.0, 50.0])).unwrap();
        assert!((p.value - 0.82).abs() < 1e-15);
        assert_eq!(
            propensity_to_consume(&econ_with(&[3.0, 4.0], &[3.0, 4.0]))
                .unwrap()
                .value,
            1.0
        );
        let over = propensity_to_consume(&econ_with(&[3.0], &[2.0])).unwrap();
        assert!(over.was_clamped() && over.value == 1.0 && over.raw == 1.5);
        assert_eq!(
            propensity_to_consume(&econ_with(&[3.0], &[0.0])).unwrap_err(),
            EconError::ZeroLaborIncome
        );
    }

    #[test]
    fn propensity_matches_scalar_ratio() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let c: Vec<f64> = (0..3).map(|_| rng.random_range(1.0..50.0)).collect();
        let l: Vec<f64> = (0..3).map(|_| rng.random_range(20.0..80.0)).collect();
        let expected = (c[0] + c[1] + c[2]) / (l[0] + l[1] + l[2]);
        let p = propensity_to_consume(&econ_with(&c, &l)).unwrap();
        assert!((p.raw - expected).abs() <= 1e-15 * expected);
    }
}
