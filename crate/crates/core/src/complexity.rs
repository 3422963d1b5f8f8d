//! Monte-Carlo Gaussian and Rademacher averages of finite vector sets.
//!
//! For `Y` a finite subset of `R^N`:
//!
//! * `G(Y) = E sup_{y in Y} <gamma, y>` with `gamma` standard normal,
//! * `R(Y) = E sup_{y in Y} <eps, y>` with `eps` uniform on `{-1, 1}^N`.
//!
//! Replicate `r` always draws its coefficients from child stream `r`, so the
//! same seed uses the same coefficient vectors for every set of dimension
//! `N`. That makes matched-seed estimates exactly monotone under adding
//! vectors, and results independent of thread scheduling.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::class::{FunctionClass, RawSampler};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub const DEFAULT_OUTER_REPS: usize = 64;
pub const DEFAULT_INNER_REPS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityKind {
    Gaussian,
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub mean: f64,
    /// Sample standard deviation over replicates divided by `sqrt(replicates)`.
    pub std_error: f64,
    pub replicates: usize,
    pub kind: ComplexityKind,
}

impl ComplexityEstimate {
    /// A known value with no Monte-Carlo error.
    pub fn exact(mean: f64, kind: ComplexityKind) -> Self {
        Self {
            mean,
            std_error: 0.0,
            replicates: 2,
            kind,
        }
    }

    /// `mean + z * std_error`
    pub fn upper(&self, z: f64) -> f64 {
        self.mean + z * self.std_error
    }

    pub(crate) fn from_samples(samples: &[f64], kind: ComplexityKind) -> Self {
        let (mean, sd) = mean_and_sd(samples);
        Self {
            mean,
            std_error: sd / (samples.len() as f64).sqrt(),
            replicates: samples.len(),
            kind,
        }
    }
}

/// Mean and sample standard deviation, in input order.
pub(crate) fn mean_and_sd(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn check_set<V: AsRef<[f64]>>(set: &[V]) -> Result<usize> {
    let first = set.first().ok_or(Error::EmptySet)?;
    let dim = first.as_ref().len();
    for v in set {
        if v.as_ref().len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: v.as_ref().len(),
            });
        }
    }
    Ok(dim)
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < 2 {
        return Err(Error::Replicates { min: 2, got: reps });
    }
    Ok(())
}

fn draw(kind: ComplexityKind, out: &mut [f64], rng: &mut SeededRng) {
    match kind {
        ComplexityKind::Gaussian => out.iter_mut().for_each(|v| *v = rng.sample(StandardNormal)),
        ComplexityKind::Rademacher => out
            .iter_mut()
            .for_each(|v| *v = if rng.random::<bool>() { 1.0 } else { -1.0 }),
    }
}

fn sup_inner<V: AsRef<[f64]>>(set: &[V], coeffs: &[f64]) -> f64 {
    set.iter()
        .map(|y| y.as_ref().iter().zip(coeffs).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn replicate_sups<V: AsRef<[f64]> + Sync>(
    kind: ComplexityKind,
    set: &[V],
    dim: usize,
    reps: usize,
    base: &SeededRng,
) -> Vec<f64> {
    (0..reps)
        .into_par_iter()
        .map_init(
            || vec![0.0; dim],
            |coeffs, r| {
                draw(kind, coeffs, &mut base.child(r as u64));
                sup_inner(set, coeffs)
            },
        )
        .collect()
}

fn average<V: AsRef<[f64]> + Sync>(
    kind: ComplexityKind,
    set: &[V],
    replicates: usize,
    rng: &mut SeededRng,
) -> Result<ComplexityEstimate> {
    let dim = check_set(set)?;
    check_reps(replicates)?;
    let base = rng.fork();
    let sups = replicate_sups(kind, set, dim, replicates, &base);
    Ok(ComplexityEstimate::from_samples(&sups, kind))
}

/// Monte-Carlo estimate of `G(Y)`.
pub fn gaussian_average<V: AsRef<[f64]> + Sync>(
    set: &[V],
    replicates: usize,
    rng: &mut SeededRng,
) -> Result<ComplexityEstimate> {
    average(ComplexityKind::Gaussian, set, replicates, rng)
}

/// Monte-Carlo estimate of `R(Y)`.
pub fn rademacher_average<V: AsRef<[f64]> + Sync>(
    set: &[V],
    replicates: usize,
    rng: &mut SeededRng,
) -> Result<ComplexityEstimate> {
    average(ComplexityKind::Rademacher, set, replicates, rng)
}

/// Either average, selected by `kind`.
pub fn set_average<V: AsRef<[f64]> + Sync>(
    kind: ComplexityKind,
    set: &[V],
    replicates: usize,
    rng: &mut SeededRng,
) -> Result<ComplexityEstimate> {
    average(kind, set, replicates, rng)
}

/// Nested estimate of `E_X[G(H(X))]` (or `R`).
///
/// Each outer replicate draws `n` raw data points, evaluates the class and
/// estimates the conditional average with `inner_reps` coefficient draws.
/// The standard error is taken across outer means.
pub fn class_complexity<X>(
    class: &FunctionClass<X>,
    sampler: &dyn RawSampler<X>,
    n: usize,
    kind: ComplexityKind,
    outer_reps: usize,
    inner_reps: usize,
    rng: &mut SeededRng,
) -> Result<ComplexityEstimate>
where
    X: Send + Sync,
{
    check_reps(outer_reps)?;
    if inner_reps == 0 {
        return Err(Error::Replicates { min: 1, got: 0 });
    }
    if class.is_empty() {
        return Err(Error::EmptySet);
    }
    let root = rng.fork();
    let means: Vec<f64> = (0..outer_reps)
        .into_par_iter()
        .map(|o| {
            let stream = root.child(o as u64);
            let raw = sampler.sample_n(n, &mut stream.child(0));
            let vectors: Vec<Vec<f64>> = class
                .evaluate_class(&raw)?
                .into_iter()
                .map(|c| c.as_slice().to_vec())
                .collect();
            let dim = vectors[0].len();
            let inner = stream.child(1);
            let sups: Vec<f64> = (0..inner_reps)
                .map(|r| {
                    let mut coeffs = vec![0.0; dim];
                    draw(kind, &mut coeffs, &mut inner.child(r as u64));
                    sup_inner(&vectors, &coeffs)
                })
                .collect();
            Ok(sups.iter().sum::<f64>() / inner_reps as f64)
        })
        .collect::<Result<_>>()?;
    Ok(ComplexityEstimate::from_samples(&means, kind))
}

/// Upper bound `3 sqrt(ln(n + 1)) r` on the Gaussian average given the
/// Rademacher average `r` of a subset of `R^n`.
pub fn gaussian_from_rademacher(r_value: f64, n: usize) -> f64 {
    3.0 * ((n as f64 + 1.0).ln()).sqrt() * r_value
}
