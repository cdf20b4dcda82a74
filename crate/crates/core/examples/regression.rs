//! Regresses single-industry supply shock losses on shock size and network
//! position, in logs.

use prodnet::analysis::{ols_loglog, single_shock_sweep, ShockMode};
use prodnet::dynamics::Params;
use prodnet::econ::{technical_coefficients, upstreamness};
use prodnet::production::ProductionKind;
use prodnet::toy;

fn main() {
    let econ = toy::generate(toy::DEFAULT_SEED).economy;
    let grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let res = single_shock_sweep(
        &econ,
        &Params::calibrated(&econ),
        &[ProductionKind::Leontief],
        ShockMode::Supply,
        &grid,
        30,
    )
    .expect("valid sweep");
    let u = upstreamness(&technical_coefficients(&econ)).expect("productive economy");
    let share = econ.x0.clone() / econ.x0.sum();
    let mut loss = Vec::new();
    let (mut size, mut up, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for c in res.cells.iter().filter(|c| c.fraction < 1.0) {
        let i = econ
            .index_of(&c.industry_code)
            .expect("sweep codes come from the economy");
        loss.push(1.0 - c.fraction);
        size.push(c.magnitude);
        up.push(u[i]);
        out.push(share[i]);
    }
    let fit = ols_loglog(
        &loss,
        &[
            ("magnitude".into(), size),
            ("upstreamness".into(), up),
            ("output_share".into(), out),
        ],
    )
    .expect("full-rank design");
    println!("{:<14} {:>9} {:>9}", "term", "coef", "se");
    for k in 0..fit.names.len() {
        println!(
            "{:<14} {:>9.4} {:>9.4}",
            fit.names[k], fit.coefficients[k], fit.std_errors[k]
        );
    }
    println!("n = {}, adjusted r2 = {:.3}", fit.n_obs, fit.adjusted_r2);
}
