//! Concrete statistic families: means, U- and V-statistics, the smoothed
//! Wilcoxon statistic, Lipschitz L-statistics, K-means losses and the ridge
//! regression error functional.
//!
//! The free functions compute a statistic from a [`Configuration`]; the
//! structs in [`family`] wrap them as [`Statistic`](crate::Statistic)s with a
//! fixed sample size and domain.

pub mod family;
mod kernels;
mod ridge;
mod weights;

pub use family::{LStatistic, MeanStatistic, RidgeError, SmoothedAuc, UStatistic, VStatistic};
pub use kernels::{u_statistic, v_statistic, Kernel, KernelFamily};
pub use ridge::{ridge_error, ridge_solution, RidgeProblem};
pub use weights::{f_zeta, LossFunction, WeightFunction};

use crate::domain::Configuration;
use crate::error::{Error, Result};

/// `(1/n) sum x_i` for a one-dimensional configuration.
pub fn sample_mean(x: &Configuration) -> Result<f64> {
    let v = x.scalars()?;
    Ok(v.iter().sum::<f64>() / v.len() as f64)
}

/// `(4/n^2) sum_{i <= n/2} sum_{j > n/2} ell(x_i - x_j)`
pub fn smoothed_auc(loss: &LossFunction, x: &Configuration) -> Result<f64> {
    let v = x.scalars()?;
    let n = v.len();
    if n % 2 != 0 {
        return Err(Error::Shape(format!("two-block statistic needs even n, got {n}")));
    }
    let (pos, neg) = v.split_at(n / 2);
    let mut sum = 0.0;
    for &a in pos {
        for &b in neg {
            sum += loss.evaluate(a - b);
        }
    }
    Ok(4.0 * sum / (n * n) as f64)
}

/// Exact Wilcoxon two-block statistic with the strict indicator `1_{(0, inf)}`.
pub fn wilcoxon_auc(x: &Configuration) -> Result<f64> {
    smoothed_auc(&LossFunction::indicator(), x)
}

/// Ascending order statistic; ties keep their input order.
pub fn order_statistic(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
}

/// `L_F(x) = (1/n) sum_i F(i/n) x_(i)` with `i = 1..n`.
pub fn l_statistic(weight: &WeightFunction, x: &Configuration) -> Result<f64> {
    let sorted = order_statistic(x.scalars()?);
    Ok(rank_weighted_mean(weight, &sorted))
}

pub(crate) fn rank_weighted_mean(weight: &WeightFunction, sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, v)| weight.evaluate((i + 1) as f64 / n) * v)
        .sum::<f64>()
        / n
}

/// `min_k |point - c_k|^2`
pub fn kmeans_loss<C: AsRef<[f64]>>(centers: &[C], point: &[f64]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::Shape("at least one center is required".into()));
    }
    let mut best = f64::INFINITY;
    for c in centers {
        let c = c.as_ref();
        if c.len() != point.len() {
            return Err(Error::Dimension {
                expected: c.len(),
                actual: point.len(),
            });
        }
        best = best.min(squared_distance(c, point));
    }
    Ok(best)
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
