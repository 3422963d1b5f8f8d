//! Sample spaces, configurations and the [`Statistic`] abstraction.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Axis-aligned box `U = [lower_1, upper_1] x ... x [lower_d, upper_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    diameter: f64,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidDomain("dimension must be positive".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::Dimension {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidDomain(format!(
                    "coordinate {i}: [{lo}, {hi}] is not a finite interval"
                )));
            }
        }
        let diameter = lower
            .iter()
            .zip(&upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt();
        Ok(Self {
            lower,
            upper,
            diameter,
        })
    }

    /// `[0, 1]^d`
    pub fn unit(d: usize) -> Self {
        Self::new(vec![0.0; d], vec![1.0; d]).expect("unit cube is valid")
    }

    /// `[-r, r]^d`
    pub fn symmetric(d: usize, r: f64) -> Result<Self> {
        Self::new(vec![-r; d], vec![r; d])
    }

    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower], vec![upper])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Euclidean diameter of the box.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim() && self.first_violation(point).is_none()
    }

    /// Index of the first coordinate of `point` outside the box.
    pub fn first_violation(&self, point: &[f64]) -> Option<usize> {
        point
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .position(|(v, (lo, hi))| !(v >= lo && v <= hi))
    }

    pub fn clamp(&self, point: &mut [f64]) {
        for (v, (lo, hi)) in point.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn sample_point(&self, rng: &mut SeededRng) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.fill_uniform(&mut p, rng);
        p
    }

    pub(crate) fn fill_uniform(&self, out: &mut [f64], rng: &mut SeededRng) {
        for (v, (lo, hi)) in out.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = lo + (hi - lo) * rng.random::<f64>();
        }
    }
}

/// A point of `U^n`: `n` rows of dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl Configuration {
    pub fn new(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Shape(format!("configuration needs n, d >= 1 (n = {n}, d = {d})")));
        }
        if data.len() != n * d {
            return Err(Error::Dimension {
                expected: n * d,
                actual: data.len(),
            });
        }
        Ok(Self { n, d, data })
    }

    /// One-dimensional configuration from scalars.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * d);
        for r in rows {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), d, data)
    }

    pub fn uniform(domain: &Domain, n: usize, rng: &mut SeededRng) -> Self {
        let d = domain.dim();
        let mut data = vec![0.0; n * d];
        for row in data.chunks_mut(d) {
            domain.fill_uniform(row, rng);
        }
        Self { n, d, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Scalars of a one-dimensional configuration.
    pub fn scalars(&self) -> Result<&[f64]> {
        if self.d != 1 {
            return Err(Error::Dimension {
                expected: 1,
                actual: self.d,
            });
        }
        Ok(&self.data)
    }

    pub fn set_row(&mut self, i: usize, value: &[f64]) {
        self.row_mut(i).copy_from_slice(value);
    }

    /// Copy with row `i` replaced by `value`.
    pub fn with_row(&self, i: usize, value: &[f64]) -> Self {
        let mut out = self.clone();
        out.set_row(i, value);
        out
    }

    /// Checks every row against `domain`.
    pub fn check_within(&self, domain: &Domain) -> Result<()> {
        if domain.dim() != self.d {
            return Err(Error::Dimension {
                expected: domain.dim(),
                actual: self.d,
            });
        }
        for (i, row) in self.rows().enumerate() {
            if let Some(c) = domain.first_violation(row) {
                return Err(Error::OutOfRange(format!(
                    "row {i} coordinate {c} = {} outside [{}, {}]",
                    row[c],
                    domain.lower()[c],
                    domain.upper()[c]
                )));
            }
        }
        Ok(())
    }
}

/// A deterministic real-valued map on `U^n`.
///
/// Implementations must return bit-identical values for identical inputs and
/// be total on the domain box.
pub trait Statistic: Send + Sync {
    fn n(&self) -> usize;
    fn domain(&self) -> &Domain;
    fn label(&self) -> &str;
    fn evaluate(&self, x: &Configuration) -> f64;
}

impl<S: Statistic + ?Sized> Statistic for &S {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn label(&self) -> &str {
        (**self).label()
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        (**self).evaluate(x)
    }
}

impl<S: Statistic + ?Sized> Statistic for Box<S> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn label(&self) -> &str {
        (**self).label()
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        (**self).evaluate(x)
    }
}

impl<S: Statistic + ?Sized> Statistic for Arc<S> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn label(&self) -> &str {
        (**self).label()
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        (**self).evaluate(x)
    }
}

type Evaluator = Arc<dyn Fn(&Configuration) -> f64 + Send + Sync>;

/// Closure-backed statistic.
#[derive(Clone)]
pub struct FnStatistic {
    n: usize,
    domain: Domain,
    label: String,
    evaluator: Evaluator,
}

impl FnStatistic {
    pub fn new<F>(label: impl Into<String>, n: usize, domain: Domain, f: F) -> Self
    where
        F: Fn(&Configuration) -> f64 + Send + Sync + 'static,
    {
        Self {
            n,
            domain,
            label: label.into(),
            evaluator: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnStatistic")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("domain", &self.domain)
            .finish()
    }
}

impl Statistic for FnStatistic {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn label(&self) -> &str {
        &self.label
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        (self.evaluator)(x)
    }
}

/// `-f`, used for the sign-symmetric direction of a bound.
#[derive(Debug, Clone)]
pub struct Negated<S>(pub S);

impl<S: Statistic> Statistic for Negated<S> {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn domain(&self) -> &Domain {
        self.0.domain()
    }
    fn label(&self) -> &str {
        self.0.label()
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        -self.0.evaluate(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_rejects_inverted_bounds() {
        assert!(Domain::new(vec![1.0], vec![0.0]).is_err());
        assert!(Domain::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Domain::new(vec![], vec![]).is_err());
        assert!(Domain::new(vec![0.0], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn diameter_is_euclidean() {
        let d = Domain::new(vec![0.0, -1.0], vec![3.0, 3.0]).unwrap();
        assert_eq!(d.diameter(), 5.0);
        assert_eq!(Domain::unit(4).diameter(), 2.0);
    }

    #[test]
    fn uniform_configuration_stays_in_box() {
        let dom = Domain::new(vec![-2.0, 0.5], vec![-1.0, 0.75]).unwrap();
        let mut rng = SeededRng::from_seed(3);
        let x = Configuration::uniform(&dom, 50, &mut rng);
        x.check_within(&dom).unwrap();
        assert_eq!(x.n(), 50);
        assert_eq!(x.dim(), 2);
    }

    #[test]
    fn with_row_leaves_original() {
        let x = Configuration::from_scalars(&[0.1, 0.2, 0.3]).unwrap();
        let y = x.with_row(1, &[0.9]);
        assert_eq!(x.row(1), &[0.2]);
        assert_eq!(y.row(1), &[0.9]);
        assert_eq!(y.row(2), &[0.3]);
    }

    #[test]
    fn from_rows_checks_ragged_input() {
        let rows = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(Configuration::from_rows(&rows).is_err());
    }
}
