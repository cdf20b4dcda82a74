//! Writes the synthetic five-industry economy to CSV.
//!
//! cargo run --example generate_toy -- [seed] [dir]

use std::path::PathBuf;

use prodnet::toy;

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args
        .next()
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(toy::DEFAULT_SEED);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy"));
    let data = toy::generate(seed);
    toy::write_files(&data, &dir)?;
    for f in toy::FILES {
        println!("{}", dir.join(f).display());
    }
    Ok(())
}
