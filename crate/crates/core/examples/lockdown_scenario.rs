//! Simulates the bundled toy configuration and prints monthly aggregate
//! output and consumption.
//!
//! cargo run --example lockdown_scenario -- [scenario] [kind]

use std::path::Path;

use prodnet::config::RunConfig;
use prodnet::dynamics::run;
use prodnet::production::ProductionKind;
use prodnet::shocks::SupplyScenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/toy.toml");
    let mut cfg = RunConfig::from_path(&path)?;
    if let Some(s) = args.next() {
        cfg.scenario.supply = s.parse::<SupplyScenario>()?;
    }
    if let Some(k) = args.next() {
        cfg.run.kind = k.parse::<ProductionKind>()?;
    }
    let econ = cfg.load_economy()?;
    let fixed = cfg.load_fixed_vectors(&econ)?;
    let spec = cfg.scenario_spec(&econ, &fixed)?;
    let attrs = cfg.load_attributes(&econ)?;
    let horizon = cfg.horizon();
    let sched = prodnet::shocks::compile_scenario(&spec, &attrs, &cfg.calendar, horizon)?;
    let traj = run(&econ, &cfg.params(&econ), &sched, cfg.run.kind, horizon)?;

    let out = traj.aggregate_output_fraction();
    let cons = traj.aggregate_consumption();
    let c0 = cons[0];
    println!("scenario {}, kind {}", cfg.scenario.supply, cfg.run.kind);
    println!("{:<8} {:>8} {:>12}", "month", "output", "consumption");
    let mut t = 0;
    while t < out.len() {
        let month = traj.date(t).format("%Y-%m").to_string();
        let end = (t..out.len())
            .find(|&u| traj.date(u).format("%Y-%m").to_string() != month)
            .unwrap_or(out.len());
        let mean = |v: &[f64]| v[t..end].iter().sum::<f64>() / (end - t) as f64;
        println!(
            "{month:<8} {:>7.1}% {:>11.1}%",
            100.0 * mean(&out),
            100.0 * mean(&cons) / c0
        );
        t = end;
    }
    Ok(())
}
