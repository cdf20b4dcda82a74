//! Hits each toy industry alone with supply shocks of growing size and
//! prints aggregate output after thirty days.

use prodnet::analysis::{single_shock_sweep, ShockMode};
use prodnet::dynamics::Params;
use prodnet::production::ProductionKind;
use prodnet::toy;

fn main() {
    let econ = toy::generate(toy::DEFAULT_SEED).economy;
    let kinds = [
        ProductionKind::Leontief,
        ProductionKind::Ihs2,
        ProductionKind::Linear,
    ];
    let grid = [0.2, 0.5, 0.8];
    let res = single_shock_sweep(
        &econ,
        &Params::calibrated(&econ),
        &kinds,
        ShockMode::Supply,
        &grid,
        30,
    )
    .expect("valid sweep");
    print!("{:<6} {:>5}", "code", "size");
    for k in kinds {
        print!(" {:>9}", k.name());
    }
    println!();
    for row in res.cells.chunks(kinds.len()) {
        print!("{:<6} {:>5}", row[0].industry_code, row[0].magnitude);
        for c in row {
            print!(" {:>8.2}%", 100.0 * c.fraction);
        }
        println!();
    }
}
