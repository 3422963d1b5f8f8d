use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::domain::Configuration;
use crate::error::{Error, Result};

/// Linear ridge regression with penalty `lambda * |w|^2`.
///
/// Rows of the data configuration are `(z_1, ..., z_d, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeProblem {
    lambda: f64,
    d: usize,
}

impl RidgeProblem {
    pub fn new(lambda: f64, d: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::OutOfRange(format!("lambda = {lambda} not in (0, 1)")));
        }
        if d == 0 {
            return Err(Error::Shape("ridge dimension must be positive".into()));
        }
        Ok(Self { lambda, d })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn check(&self, x: &Configuration) -> Result<()> {
        if x.dim() != self.d + 1 {
            return Err(Error::Dimension {
                expected: self.d + 1,
                actual: x.dim(),
            });
        }
        Ok(())
    }
}

/// `w = ((1/n) sum z z^T + lambda I)^{-1} (1/n) sum y z`
pub fn ridge_solution(x: &Configuration, problem: &RidgeProblem) -> Result<Vec<f64>> {
    problem.check(x)?;
    let d = problem.d;
    let n = x.n() as f64;
    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    for row in x.rows() {
        let (z, y) = row.split_at(d);
        for a in 0..d {
            rhs[a] += y[0] * z[a];
            for b in 0..=a {
                gram[(a, b)] += z[a] * z[b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            gram[(b, a)] = gram[(a, b)];
        }
    }
    gram /= n;
    rhs /= n;
    for a in 0..d {
        gram[(a, a)] += problem.lambda;
    }
    let chol = gram
        .cholesky()
        .expect("regularized Gram matrix is positive definite");
    Ok(chol.solve(&rhs).iter().copied().collect())
}

/// Empirical error `(1/n) sum (<w(x), z_i> - y_i)^2` of the ridge solution.
pub fn ridge_error(x: &Configuration, problem: &RidgeProblem) -> Result<f64> {
    let w = ridge_solution(x, problem)?;
    Ok(mean_squared_residual(x, &w))
}

pub(crate) fn mean_squared_residual(x: &Configuration, w: &[f64]) -> f64 {
    let d = w.len();
    let total: f64 = x
        .rows()
        .map(|row| {
            let (z, y) = row.split_at(d);
            let pred: f64 = w.iter().zip(z).map(|(a, b)| a * b).sum();
            (pred - y[0]).powi(2)
        })
        .sum();
    total / x.n() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::rng::SeededRng;
    use proptest::prelude::*;

    #[test]
    fn scalar_closed_form() {
        let x = Configuration::from_rows(&[[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]).unwrap();
        let p = RidgeProblem::new(0.5, 1).unwrap();
        let w = ridge_solution(&x, &p).unwrap();
        // 1 / (1 + lambda)
        assert!((w[0] - 1.0 / 1.5).abs() < 1e-14);
        let small = RidgeProblem::new(1e-6, 1).unwrap();
        assert!((ridge_solution(&x, &small).unwrap()[0] - 1.0 / (1.0 + 1e-6)).abs() < 1e-12);
    }

    #[test]
    fn lambda_one_boundary_is_rejected_but_limit_matches() {
        assert!(RidgeProblem::new(1.0, 1).is_err());
        assert!(RidgeProblem::new(0.0, 1).is_err());
        // lambda -> 1: w -> 0.5, error -> 0.25
        let x = Configuration::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let p = RidgeProblem::new(1.0 - 1e-12, 1).unwrap();
        assert!((ridge_solution(&x, &p).unwrap()[0] - 0.5).abs() < 1e-11);
        assert!((ridge_error(&x, &p).unwrap() - 0.25).abs() < 1e-11);
    }

    #[test]
    fn zero_labels_give_zero() {
        let x = Configuration::from_rows(&[[0.3, -0.2, 0.0], [0.1, 0.5, 0.0]]).unwrap();
        let p = RidgeProblem::new(0.3, 2).unwrap();
        assert_eq!(ridge_solution(&x, &p).unwrap(), vec![0.0, 0.0]);
        assert_eq!(ridge_error(&x, &p).unwrap(), 0.0);
    }

    #[test]
    fn error_matches_residuals_of_solution() {
        let mut rng = SeededRng::from_seed(5);
        let dom = Domain::symmetric(4, 0.5).unwrap();
        let x = Configuration::uniform(&dom, 20, &mut rng);
        let p = RidgeProblem::new(0.2, 3).unwrap();
        let w = ridge_solution(&x, &p).unwrap();
        let direct: f64 = x
            .rows()
            .map(|r| (w[0] * r[0] + w[1] * r[1] + w[2] * r[2] - r[3]).powi(2))
            .sum::<f64>()
            / 20.0;
        assert!((ridge_error(&x, &p).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn solution_is_stationary_point() {
        // gradient of (1/n)|Zw - y|^2 + lambda |w|^2 vanishes at w
        let mut rng = SeededRng::from_seed(8);
        let x = Configuration::uniform(&Domain::symmetric(3, 0.5).unwrap(), 15, &mut rng);
        let p = RidgeProblem::new(0.4, 2).unwrap();
        let w = ridge_solution(&x, &p).unwrap();
        let mut grad = [2.0 * 0.4 * w[0], 2.0 * 0.4 * w[1]];
        for r in x.rows() {
            let res = w[0] * r[0] + w[1] * r[1] - r[2];
            grad[0] += 2.0 * res * r[0] / 15.0;
            grad[1] += 2.0 * res * r[1] / 15.0;
        }
        assert!(grad[0].abs() < 1e-14 && grad[1].abs() < 1e-14);
    }

    #[test]
    fn wrong_row_dimension() {
        let x = Configuration::from_rows(&[[1.0, 1.0]]).unwrap();
        let p = RidgeProblem::new(0.5, 2).unwrap();
        assert!(matches!(ridge_solution(&x, &p), Err(Error::Dimension { .. })));
    }

    proptest! {
        #[test]
        fn error_below_zero_predictor_objective(
            rows in prop::collection::vec((-0.7f64..0.7, -0.7f64..0.7, -1.0f64..1.0), 1..25),
            lambda in 0.01f64..0.99,
        ) {
            let rows: Vec<[f64; 3]> = rows.into_iter().map(|(a, b, y)| [a, b, y]).collect();
            let x = Configuration::from_rows(&rows).unwrap();
            let p = RidgeProblem::new(lambda, 2).unwrap();
            let err = ridge_error(&x, &p).unwrap();
            let baseline: f64 = rows.iter().map(|r| r[2] * r[2]).sum::<f64>() / rows.len() as f64;
            prop_assert!(err <= baseline + 1e-12);
        }
    }
}
