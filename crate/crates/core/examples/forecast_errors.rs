//! Scores each toy supply scenario against a reference panel.
//!
//! There is no observed data for the toy economy, so the reference is the
//! linear run of S5; pass a panel CSV (industry_code,month,value) to score
//! against something else.
//!
//! cargo run --example forecast_errors -- [panel.csv]

use prodnet::analysis::{afe_aggregate, afe_sectoral, MonthlyPanel, PanelSource};
use prodnet::dynamics::{run, Params, Trajectory};
use prodnet::production::ProductionKind;
use prodnet::shocks::{compile_scenario, Calendar, ScenarioSpec, SupplyScenario};
use prodnet::toy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let toy = toy::generate(toy::DEFAULT_SEED);
    let econ = &toy.economy;
    let params = Params::calibrated(econ);
    let cal = Calendar::default();
    let horizon = cal.default_horizon();
    let simulate =
        |scenario: SupplyScenario, kind| -> Result<Trajectory, Box<dyn std::error::Error>> {
            let mut spec = ScenarioSpec::new(scenario, &econ.f_categories);
            spec.fixed_vector = match scenario {
                SupplyScenario::S5 => Some(toy.s5.clone()),
                SupplyScenario::S6 => Some(toy.s6.clone()),
                _ => None,
            };
            let sched = compile_scenario(&spec, &toy.attributes, &cal, horizon)?;
            Ok(run(econ, &params, &sched, kind, horizon)?)
        };
    let base = (2020, 2);
    let months = [(2020, 4), (2020, 5), (2020, 6)];
    let data = match std::env::args().nth(1) {
        Some(p) => MonthlyPanel::read_csv(std::fs::File::open(p)?, PanelSource::Empirical)?,
        None => MonthlyPanel::from_trajectory(
            &simulate(SupplyScenario::S5, ProductionKind::Linear)?,
            base,
        )?,
    };
    let weights = econ.x0.as_slice();
    println!("{:<9} {:>9} {:>10}", "scenario", "sectoral", "aggregate");
    for scenario in [
        SupplyScenario::S1,
        SupplyScenario::S2,
        SupplyScenario::S3,
        SupplyScenario::S4,
        SupplyScenario::S5,
        SupplyScenario::S6,
    ] {
        let model =
            MonthlyPanel::from_trajectory(&simulate(scenario, ProductionKind::Ihs2)?, base)?;
        let s = afe_sectoral(&model, &data, &econ.industry_codes, weights, &months)?;
        let a = afe_aggregate(&model, &data, &econ.industry_codes, weights, &months)?;
        println!("{:<9} {s:>9.2} {a:>10.2}", scenario.to_string());
    }
    Ok(())
}
