//! Output each production function allows for one industry when one of its
//! three inputs (critical, important, non-critical) runs short.

use nalgebra::{DMatrix, DVector};
use prodnet::econ::CriticalityMatrix;
use prodnet::production::{input_constrained_output, InputState, ProductionKind};

fn main() {
    // industry 3 uses inputs 0..3; ratings are 1, 0.5 and 0
    let n = 4;
    let mut a = DMatrix::zeros(n, n);
    let mut ratings = DMatrix::zeros(n, n);
    for (j, (coef, rating)) in [(0.2, 1.0), (0.1, 0.5), (0.3, 0.0)].into_iter().enumerate() {
        a[(j, 3)] = coef;
        ratings[(j, 3)] = rating;
    }
    let criticality = CriticalityMatrix::new(ratings).expect("valid ratings");
    let xcap0 = DVector::from_element(n, 100.0);
    println!(
        "{:<18} {:>9} {:>9} {:>9}",
        "kind", "critical", "important", "other"
    );
    let mut rows: Vec<Vec<String>> = ProductionKind::ALL
        .iter()
        .map(|k| vec![k.name().to_string()])
        .collect();
    // stocks cover 100 units of output, except the short input covers 40
    for short in 0..3 {
        let s = DMatrix::from_fn(n, n, |j, i| {
            let cover = if j == short { 40.0 } else { 100.0 };
            if i == 3 {
                a[(j, i)] * cover
            } else {
                0.0
            }
        });
        let st = InputState {
            s: &s,
            a: &a,
            criticality: &criticality,
            xcap0: &xcap0,
        };
        for (row, kind) in rows.iter_mut().zip(ProductionKind::ALL) {
            let bound = input_constrained_output(kind, &st)[3];
            row.push(
                bound
                    .finite()
                    .map_or("unbounded".into(), |v| format!("{v:.1}")),
            );
        }
    }
    for r in rows {
        println!("{:<18} {:>9} {:>9} {:>9}", r[0], r[1], r[2], r[3]);
    }
}
