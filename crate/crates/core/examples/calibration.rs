//! Derives criticality, inventory targets and the propensity to consume from
//! the raw toy inputs.

use prodnet::econ::{aggregate_ratings, inventory_targets_from_survey, propensity_to_consume};
use prodnet::toy;

fn main() {
    let toy = toy::generate(toy::DEFAULT_SEED);
    let codes = &toy.table.industry_codes;
    let crit = aggregate_ratings(&toy.analyst_ratings).expect("valid ratings");
    println!("criticality (rows: inputs, columns: using industry)");
    print!("{:<6}", "");
    for c in codes {
        print!(" {c:>5}");
    }
    println!();
    for (j, c) in codes.iter().enumerate() {
        print!("{c:<6}");
        for i in 0..codes.len() {
            print!(" {:>5}", crit.rating(j, i));
        }
        println!();
    }

    let services: Vec<String> = toy::SERVICE_CODES.iter().map(|s| s.to_string()).collect();
    let targets =
        inventory_targets_from_survey(&toy.survey, codes, None, toy::SURVEY_DECAY, &services)
            .expect("valid survey");
    println!("\ninventory targets (days)");
    for (c, n) in codes.iter().zip(targets.iter()) {
        println!("{c:<6} {n:>7.2}");
    }

    let m = propensity_to_consume(&toy.economy).expect("positive labor income");
    println!("\npropensity to consume {:.4}", m.value);
}
