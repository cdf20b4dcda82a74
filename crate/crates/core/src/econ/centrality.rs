use nalgebra::{DMatrix, DVector};

use super::{EconError, Result, TechnicalCoefficients};

/// Solves `(I - m) v = 1` by dense LU.
fn solve_against_ones(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = m.nrows();
    let lhs = DMatrix::<f64>::identity(n, n) - m;
    let lu = lhs.lu();
    let v = lu
        .solve(&DVector::from_element(n, 1.0))
        .ok_or(EconError::SingularSystem)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(EconError::SingularSystem);
    }
    Ok(v)
}

/// Row sums of `(I - B)^-1`: average number of stages to final use.
pub fn upstreamness(tc: &TechnicalCoefficients) -> Result<DVector<f64>> {
    solve_against_ones(&tc.b_alloc)
}

/// Column sums of the Leontief inverse `(I - A)^-1`.
pub fn output_multipliers(tc: &TechnicalCoefficients) -> Result<DVector<f64>> {
    solve_against_ones(&tc.a.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn neumann(m: &DMatrix<f64>, terms: usize) -> DVector<f64> {
        let n = m.nrows();
        let mut acc = DVector::from_element(n, 1.0);
        let mut term = DVector::from_element(n, 1.0);
        for _ in 1..terms {
            term = m * term;
            acc += &term;
        }
        acc
    }

    fn tc_from(a: DMatrix<f64>, b: DMatrix<f64>) -> TechnicalCoefficients {
        TechnicalCoefficients { a, b_alloc: b }
    }

    #[test]
    fn zero_matrices_give_ones() {
        let tc = tc_from(DMatrix::zeros(3, 3), DMatrix::zeros(3, 3));
        assert_eq!(upstreamness(&tc).unwrap().as_slice(), &[1.0; 3]);
        assert_eq!(output_multipliers(&tc).unwrap().as_slice(), &[1.0; 3]);
    }

    #[test]
    fn singular_system_detected() {
        let tc = tc_from(DMatrix::identity(2, 2), DMatrix::identity(2, 2));
        assert_eq!(upstreamness(&tc).unwrap_err(), EconError::SingularSystem);
        assert_eq!(
            output_multipliers(&tc).unwrap_err(),
            EconError::SingularSystem
        );
    }

    #[test]
    fn three_by_three_matches_neumann() {
        let b = DMatrix::from_row_slice(3, 3, &[0.1, 0.2, 0.0, 0.0, 0.1, 0.3, 0.2, 0.0, 0.1]);
        let a = b.transpose() * 0.5;
        let tc = tc_from(a.clone(), b.clone());
        let u = upstreamness(&tc).unwrap();
        let m = output_multipliers(&tc).unwrap();
        assert!((u - neumann(&b, 200)).amax() < 1e-10);
        assert!((m - neumann(&a.transpose(), 200)).amax() < 1e-10);
    }

    /// Random nonnegative matrix rescaled so its max column and row sum are
    /// below `target`, bounding the spectral radius.
    fn contraction(n: usize, vals: &[f64], target: f64) -> DMatrix<f64> {
        let mut m = DMatrix::from_iterator(n, n, vals.iter().take(n * n).copied());
        let col = m.column_iter().map(|c| c.sum()).fold(0.0, f64::max);
        let row = m.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
        let norm = col.max(row);
        if norm > 0.0 {
            m *= target / norm;
        }
        m
    }

    proptest! {
        #[test]
        fn upstreamness_residual_and_lower_bound(
            n in 1usize..8,
            vals in prop::collection::vec(0.0f64..1.0, 64),
            target in 0.0f64..0.9,
        ) {
            let b = contraction(n, &vals, target);
            let tc = tc_from(DMatrix::zeros(n, n), b.clone());
            let u = upstreamness(&tc).unwrap();
            let residual = (DMatrix::<f64>::identity(n, n) - &b) * &u - DVector::from_element(n, 1.0);
            prop_assert!(residual.amax() < 1e-9);
            prop_assert!(u.iter().all(|v| *v >= 1.0 - 1e-12));
        }

        #[test]
        fn multipliers_equal_leontief_inverse_column_sums(
            n in 1usize..8,
            vals in prop::collection::vec(0.0f64..1.0, 64),
            target in 0.0f64..0.9,
        ) {
            let a = contraction(n, &vals, target);
            let tc = tc_from(a.clone(), DMatrix::zeros(n, n));
            let m = output_multipliers(&tc).unwrap();
            let inv = (DMatrix::<f64>::identity(n, n) - &a).try_inverse().unwrap();
            for i in 0..n {
                prop_assert!((m[i] - inv.column(i).sum()).abs() < 1e-9);
            }
        }
    }
}
