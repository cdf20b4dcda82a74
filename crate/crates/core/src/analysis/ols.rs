use nalgebra::{DMatrix, DVector};

use super::{AnalysisError, Result};

/// Relative size of a QR pivot below which the design is called rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// `"const"` followed by the regressor names.
    pub names: Vec<String>,
    pub coefficients: DVector<f64>,
    /// Classical (homoskedastic) standard errors.
    pub std_errors: DVector<f64>,
    /// Zero when the response has no variation.
    pub r2: f64,
    pub adjusted_r2: f64,
    pub n_obs: usize,
    pub residual_variance: f64,
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Option<(f64, f64)> {
        let k = self.names.iter().position(|n| n == name)?;
        Some((self.coefficients[k], self.std_errors[k]))
    }
}

/// Least squares of `y` on `x` (which must already contain any intercept
/// column), solved through a thin QR factorisation.
pub fn ols(y: &DVector<f64>, x: &DMatrix<f64>, names: Vec<String>) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if y.len() != n || names.len() != k {
        return Err(AnalysisError::Dimension(format!(
            "{} responses, {n}x{k} design, {} names",
            y.len(),
            names.len()
        )));
    }
    if n < k + 1 {
        return Err(AnalysisError::TooFewRows {
            rows: n,
            columns: k,
        });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let q = qr.q();
    let scale = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || r.diagonal().iter().any(|v| v.abs() <= RANK_TOL * scale) {
        return Err(AnalysisError::RankDeficient);
    }
    let beta = r
        .solve_upper_triangular(&(q.transpose() * y))
        .ok_or(AnalysisError::RankDeficient)?;
    let resid = y - x * &beta;
    let rss = resid.norm_squared();
    let dof = (n - k) as f64;
    let sigma2 = rss / dof;
    let r_inv = r.try_inverse().ok_or(AnalysisError::RankDeficient)?;
    let cov = &r_inv * r_inv.transpose() * sigma2;
    let se = DVector::from_iterator(k, (0..k).map(|i| cov[(i, i)].max(0.0).sqrt()));

    let mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let (r2, adjusted_r2) = if tss > 0.0 {
        let r2 = 1.0 - rss / tss;
        (r2, 1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof)
    } else {
        (0.0, 0.0)
    };
    Ok(OlsFit {
        names,
        coefficients: beta,
        std_errors: se,
        r2,
        adjusted_r2,
        n_obs: n,
        residual_variance: sigma2,
    })
}

/// Regresses `ln y` on an intercept and `ln` of each named column.
pub fn ols_loglog(y: &[f64], columns: &[(String, Vec<f64>)]) -> Result<OlsFit> {
    let n = y.len();
    let log = |name: &str, v: &[f64]| -> Result<Vec<f64>> {
        if v.len() != n {
            return Err(AnalysisError::Dimension(format!(
                "column {name} has {} rows, expected {n}",
                v.len()
            )));
        }
        v.iter()
            .enumerate()
            .map(|(row, &x)| {
                if x > 0.0 && x.is_finite() {
                    Ok(x.ln())
                } else {
                    Err(AnalysisError::NonPositiveValue {
                        column: name.to_string(),
                        row,
                    })
                }
            })
            .collect()
    };
    let ly = DVector::from_vec(log("y", y)?);
    let k = columns.len() + 1;
    let mut x = DMatrix::from_element(n, k, 1.0);
    let mut names = vec!["const".to_string()];
    for (c, (name, v)) in columns.iter().enumerate() {
        x.set_column(c + 1, &DVector::from_vec(log(name, v)?));
        names.push(name.clone());
    }
    ols(&ly, &x, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, Uniform};

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (1..=6).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let fit = ols_loglog(&y, &[("x".into(), x)]).unwrap();
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[0] - 2f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intercept_only_on_constant() {
        let fit = ols_loglog(&[3.0; 5], &[]).unwrap();
        assert!((fit.coefficients[0] - 3f64.ln()).abs() < 1e-15);
        assert_eq!(fit.r2, 0.0);
        assert_eq!(fit.adjusted_r2, 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            ols_loglog(&[1.0, 2.0, 0.0], &[]),
            Err(AnalysisError::NonPositiveValue { row: 2, .. })
        ));
        assert!(matches!(
            ols_loglog(&[1.0, 2.0], &[("x".into(), vec![1.0, 2.0])]),
            Err(AnalysisError::TooFewRows { .. })
        ));
        let x = vec![1.0, 2.0, 4.0, 8.0];
        let cols = [
            ("a".to_string(), x.clone()),
            ("b".to_string(), x.iter().map(|v| v * v).collect()),
        ];
        assert_eq!(
            ols_loglog(&[1.0, 2.0, 3.0, 4.0], &cols).unwrap_err(),
            AnalysisError::RankDeficient
        );
    }

    /// `(X'X)^-1 X'y` by explicit inversion.
    fn normal_equations(y: &DVector<f64>, x: &DMatrix<f64>) -> DVector<f64> {
        let xtx = x.transpose() * x;
        xtx.try_inverse().unwrap() * x.transpose() * y
    }

    #[test]
    fn matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = Uniform::new(0.0, 1.0).unwrap();
        for _ in 0..20 {
            let n = 40;
            let x = DMatrix::from_fn(n, 4, |_, c| {
                if c == 0 {
                    1.0
                } else {
                    u.sample(&mut rng) * 4.0 - 2.0
                }
            });
            let y = DVector::from_fn(n, |_, _| u.sample(&mut rng));
            let fit = ols(
                &y,
                &x,
                vec!["const".into(), "a".into(), "b".into(), "c".into()],
            )
            .unwrap();
            let oracle = normal_equations(&y, &x);
            for k in 0..4 {
                assert!((fit.coefficients[k] - oracle[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn recovers_planted_elasticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2020);
        let u = Uniform::new(0.5, 5.0).unwrap();
        let noise = Normal::new(0.0, 0.1).unwrap();
        let xs: Vec<f64> = (0..200).map(|_| u.sample(&mut rng)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| (3.0 - 0.5 * x.ln() + noise.sample(&mut rng)).exp())
            .collect();
        let fit = ols_loglog(&ys, &[("u".into(), xs)]).unwrap();
        let (b0, s0) = fit.coefficient("const").unwrap();
        let (b1, s1) = fit.coefficient("u").unwrap();
        assert!((b0 - 3.0).abs() < 3.0 * s0, "{b0} +- {s0}");
        assert!((b1 + 0.5).abs() < 3.0 * s1, "{b1} +- {s1}");
        assert!(fit.adjusted_r2 > 0.5);
    }
}
