//! Runs the toy economy with no shocks under every production function and
//! reports how far output drifts from its starting level.

use prodnet::dynamics::{run, Params};
use prodnet::production::ProductionKind;
use prodnet::shocks::{Calendar, ShockSchedule};
use prodnet::toy;

fn main() {
    let econ = toy::generate(toy::DEFAULT_SEED).economy;
    let days = 180;
    let quiet = ShockSchedule::quiet(
        Calendar::default(),
        econ.n_industries(),
        econ.f_categories.len(),
        days,
    );
    let params = Params::calibrated(&econ);
    let x0 = &econ.x0;
    println!("{:<18} {:>12}", "kind", "max drift");
    for kind in ProductionKind::ALL {
        let traj = run(&econ, &params, &quiet, kind, days).expect("valid toy run");
        let drift = traj
            .records
            .iter()
            .flat_map(|r| (0..x0.len()).map(move |i| (r.x[i] / x0[i] - 1.0).abs()))
            .fold(0.0, f64::max);
        println!("{:<18} {:>12.2e}", kind.name(), drift);
    }
}
