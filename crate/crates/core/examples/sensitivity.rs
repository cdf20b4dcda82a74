//! Varies the inventory adjustment time and the production function under
//! the S6 toy scenario and prints the output trough of each combination.

use std::collections::BTreeMap;

use prodnet::analysis::{sensitivity_sweep, Axis, ParamName, SweepBase, SweepDesign};
use prodnet::dynamics::Params;
use prodnet::production::ProductionKind;
use prodnet::shocks::{Calendar, ScenarioSpec, SupplyScenario};
use prodnet::toy;

fn main() {
    let toy = toy::generate(toy::DEFAULT_SEED);
    let econ = &toy.economy;
    let mut spec = ScenarioSpec::new(SupplyScenario::S6, &econ.f_categories);
    spec.fixed_vector = Some(toy.s6.clone());
    let calendar = Calendar::default();
    let base = SweepBase {
        econ,
        attrs: &toy.attributes,
        spec,
        fixed_vectors: BTreeMap::new(),
        horizon: calendar.default_horizon(),
        calendar,
        params: Params::calibrated(econ),
        kind: ProductionKind::Ihs2,
    };
    let axes = [
        Axis::Param(ParamName::Tau, vec![5.0, 10.0, 30.0]),
        Axis::Kind(vec![
            ProductionKind::Leontief,
            ProductionKind::Ihs2,
            ProductionKind::Linear,
        ]),
    ];
    let cells = sensitivity_sweep(&base, &axes, SweepDesign::Cartesian, true).expect("valid sweep");
    println!("{:>5} {:<10} {:>8} {:>8}", "tau", "kind", "trough", "mean");
    for c in cells {
        let trough = c
            .output_fraction
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let mean = c.output_fraction.iter().sum::<f64>() / c.output_fraction.len() as f64;
        println!(
            "{:>5} {:<10} {:>7.1}% {:>7.1}%",
            c.settings[0].1,
            c.settings[1].1,
            100.0 * trough,
            100.0 * mean
        );
    }
}
