//! Upstreamness and output multipliers of the toy economy.

use prodnet::econ::{output_multipliers, technical_coefficients, upstreamness};
use prodnet::toy;

fn main() {
    let econ = toy::generate(toy::DEFAULT_SEED).economy;
    let tc = technical_coefficients(&econ);
    let u = upstreamness(&tc).expect("productive economy");
    let m = output_multipliers(&tc).expect("productive economy");
    println!(
        "{:<6} {:>10} {:>12} {:>10}",
        "code", "x0", "upstreamness", "multiplier"
    );
    for (i, code) in econ.industry_codes.iter().enumerate() {
        println!(
            "{code:<6} {:>10.2} {:>12.4} {:>10.4}",
            econ.x0[i], u[i], m[i]
        );
    }
}
