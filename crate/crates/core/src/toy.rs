//! Seeded synthetic five-industry economy used as the bundled fixture.
//!
//! Generation: draw a sparse technical-coefficient matrix with column sums
//! well below one, draw final demand per industry, solve for gross output,
//! then split final demand into household consumption and five other
//! categories and set labor compensation to a random share of value added.
//! Ratings come from three simulated analysts who mostly agree on a latent
//! rating, with a few missing answers. Inventory coverage comes from a
//! four-year stock/turnover survey that skips one industry entirely.
//! Flows are rounded to four decimals so the CSV files are exact.

use std::io;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::econ::{
    aggregate_ratings, inventory_targets_from_survey, validate_economy, CriticalityMatrix, Economy,
    IoTable, SurveyRecord, DEFAULT_FINAL_DEMAND_CATEGORIES, DEFAULT_MARKET_CLEARING_TOL,
};
use crate::io as pio;
use crate::shocks::IndustryAttributes;

pub const DEFAULT_SEED: u64 = 7;

pub const CODES: [&str; 5] = ["A01", "C29", "G47", "I", "O84"];

/// Industries whose missing survey data is filled from each other.
pub const SERVICE_CODES: [&str; 3] = ["G47", "I", "O84"];

pub const SURVEY_DECAY: f64 = 0.95;

#[derive(Debug, Clone)]
pub struct ToyData {
    pub table: IoTable,
    /// One matrix per analyst; `None` where the analyst gave no answer.
    pub analyst_ratings: Vec<DMatrix<Option<f64>>>,
    pub survey: Vec<SurveyRecord>,
    pub attributes: IndustryAttributes,
    pub s5: Vec<f64>,
    pub s6: Vec<f64>,
    pub criticality: CriticalityMatrix,
    pub inventory_targets: DVector<f64>,
    pub economy: Economy,
}

fn r4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn r2(v: f64) -> f64 {
    (v * 1e2).round() / 1e2
}

pub fn generate(seed: u64) -> ToyData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = CODES.len();
    let codes: Vec<String> = CODES.iter().map(|s| s.to_string()).collect();
    let categories: Vec<String> = DEFAULT_FINAL_DEMAND_CATEGORIES
        .iter()
        .map(|s| s.to_string())
        .collect();

    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j == i {
                a[(j, i)] = rng.random_range(0.02..0.08);
            } else if rng.random_bool(0.75) {
                a[(j, i)] = rng.random_range(0.03..0.2);
            }
        }
    }
    let y = DVector::from_fn(n, |_, _| rng.random_range(20.0..60.0));
    let x = (DMatrix::identity(n, n) - &a)
        .lu()
        .solve(&y)
        .expect("column sums below one");

    let z = DMatrix::from_fn(n, n, |j, i| r4(a[(j, i)] * x[i]));
    let mut c = DVector::zeros(n);
    let mut f = DMatrix::zeros(n, categories.len());
    for i in 0..n {
        c[i] = r4(y[i] * rng.random_range(0.35..0.55));
        let rest = y[i] - c[i];
        let w: Vec<f64> = (0..categories.len())
            .map(|_| rng.random_range(0.1..1.0))
            .collect();
        let wsum: f64 = w.iter().sum();
        for (k, wk) in w.iter().enumerate() {
            f[(i, k)] = r4(rest * wk / wsum);
        }
    }
    let totals = DVector::from_fn(n, |i, _| z.row(i).sum() + c[i] + f.row(i).sum());
    let l = DVector::from_fn(n, |i, _| {
        let va = totals[i] - z.column(i).sum();
        r4(va * rng.random_range(0.6..0.8))
    });
    let table = IoTable {
        industry_codes: codes.clone(),
        z,
        c,
        f,
        f_categories: categories,
        l,
        x: Some(totals),
    };

    let levels = [0.0, 0.5, 1.0];
    let mut analyst_ratings = vec![DMatrix::from_element(n, n, None); 3];
    for i in 0..n {
        for j in 0..n {
            if table.z[(j, i)] <= 0.0 {
                continue;
            }
            let latent = if j == i {
                2
            } else {
                rng.random_range(0..3usize)
            };
            for m in analyst_ratings.iter_mut() {
                let draw: f64 = rng.random();
                m[(j, i)] = if draw < 0.1 {
                    None
                } else if draw < 0.8 {
                    Some(levels[latent])
                } else {
                    Some(levels[rng.random_range(0..3usize)])
                };
            }
        }
    }
    let criticality = aggregate_ratings(&analyst_ratings).expect("three analysts, valid levels");

    let mut survey = Vec::new();
    for (i, code) in codes.iter().enumerate() {
        if code == "O84" {
            continue;
        }
        let days = rng.random_range(2.0..9.0);
        for year in 2015..=2018 {
            let turnover = r2(365.0 * x[i] * rng.random_range(0.9..1.1));
            let stock =
                |rng: &mut ChaCha8Rng| r2(days * turnover / 365.0 * rng.random_range(0.85..1.15));
            let (mut begin, end) = (stock(&mut rng), stock(&mut rng));
            if code == "C29" && year == 2016 {
                begin = f64::NAN;
            }
            survey.push(SurveyRecord {
                industry_code: code.clone(),
                year,
                begin_stock: begin,
                end_stock: end,
                turnover,
            });
        }
    }
    let services: Vec<String> = SERVICE_CODES.iter().map(|s| s.to_string()).collect();
    let inventory_targets =
        inventory_targets_from_survey(&survey, &codes, None, SURVEY_DECAY, &services)
            .expect("survey covers four industries");

    let ess_fixed = [Some(1.0), None, Some(0.71), Some(0.05), Some(1.0)];
    let eps_d_range = [(0.0, 0.2), (0.3, 0.6), (0.1, 0.4), (0.6, 0.85), (0.0, 0.0)];
    let mut attributes = IndustryAttributes {
        industry_codes: codes.clone(),
        rli: Vec::new(),
        ess: Vec::new(),
        ppi: Vec::new(),
        eps_d_lockdown: Vec::new(),
    };
    for i in 0..n {
        attributes.rli.push(r4(rng.random_range(0.05..0.6)));
        attributes
            .ess
            .push(ess_fixed[i].unwrap_or_else(|| r4(rng.random_range(0.2..0.6))));
        attributes.ppi.push(r4(rng.random_range(0.2..1.0)));
        let (lo, hi) = eps_d_range[i];
        attributes.eps_d_lockdown.push(if hi > lo {
            r4(rng.random_range(lo..hi))
        } else {
            lo
        });
    }
    let s5: Vec<f64> = (0..n).map(|_| r4(rng.random_range(0.0..0.5))).collect();
    let s6: Vec<f64> = s5
        .iter()
        .map(|v| r4((v + rng.random_range(0.1..0.3)).min(1.0)))
        .collect();

    let economy = validate_economy(
        &table,
        inventory_targets.clone(),
        criticality.clone(),
        DEFAULT_MARKET_CLEARING_TOL,
    )
    .expect("generated table clears markets");
    ToyData {
        table,
        analyst_ratings,
        survey,
        attributes,
        s5,
        s6,
        criticality,
        inventory_targets,
        economy,
    }
}

/// File names written by [`write_files`].
pub const FILES: [&str; 7] = [
    "io_table.csv",
    "ratings.csv",
    "inventory_survey.csv",
    "inventory_targets.csv",
    "attributes.csv",
    "supply_s5.csv",
    "supply_s6.csv",
];

pub fn write_files(data: &ToyData, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let create = |name: &str| std::fs::File::create(dir.join(name));
    pio::write_io_table(&data.table, create(FILES[0])?)?;
    pio::write_ratings(
        &data.table.industry_codes,
        &data.analyst_ratings,
        create(FILES[1])?,
    )?;
    pio::write_survey(&data.survey, create(FILES[2])?)?;
    pio::write_vector(
        &data.table.industry_codes,
        "n",
        data.inventory_targets.as_slice(),
        create(FILES[3])?,
    )?;
    pio::write_attributes(&data.attributes, create(FILES[4])?)?;
    pio::write_vector(
        &data.table.industry_codes,
        "eps_s",
        &data.s5,
        create(FILES[5])?,
    )?;
    pio::write_vector(
        &data.table.industry_codes,
        "eps_s",
        &data.s6,
        create(FILES[6])?,
    )?;
    Ok(())
}
