//! Finite function classes `H` and samplers for the raw space `X`.
//!
//! The raw space is opaque: a datum is whatever the sampler produces, and the
//! only thing the rest of the crate does with it is map it through class
//! members into the statistic's domain box.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::domain::{Configuration, Domain};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

type Member<X> = Arc<dyn Fn(&X) -> Vec<f64> + Send + Sync>;

/// An ordered, finite list of maps from raw data into a [`Domain`].
pub struct FunctionClass<X> {
    domain: Domain,
    labels: Vec<String>,
    members: Vec<Member<X>>,
}

impl<X> Clone for FunctionClass<X> {
    fn clone(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            labels: self.labels.clone(),
            members: self.members.clone(),
        }
    }
}

impl<X> fmt::Debug for FunctionClass<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionClass")
            .field("domain", &self.domain)
            .field("members", &self.labels)
            .finish()
    }
}

impl<X> FunctionClass<X> {
    pub fn new(domain: Domain) -> Self {
        Self {
            domain,
            labels: Vec::new(),
            members: Vec::new(),
        }
    }

    pub fn with_member<F>(mut self, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&X) -> Vec<f64> + Send + Sync + 'static,
    {
        self.push(label, f);
        self
    }

    pub fn push<F>(&mut self, label: impl Into<String>, f: F)
    where
        F: Fn(&X) -> Vec<f64> + Send + Sync + 'static,
    {
        self.labels.push(label.into());
        self.members.push(Arc::new(f));
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Applies member `j` to every datum.
    pub fn evaluate_member(&self, j: usize, raw: &[X]) -> Result<Configuration> {
        let d = self.domain.dim();
        let member = &self.members[j];
        let mut data = Vec::with_capacity(raw.len() * d);
        for (i, datum) in raw.iter().enumerate() {
            let p = member(datum);
            if p.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    actual: p.len(),
                });
            }
            if let Some(c) = self.domain.first_violation(&p) {
                return Err(Error::DomainViolation {
                    member: self.labels[j].clone(),
                    datum: i,
                    coordinate: c,
                    value: p[c],
                    lower: self.domain.lower()[c],
                    upper: self.domain.upper()[c],
                });
            }
            data.extend_from_slice(&p);
        }
        Configuration::new(raw.len(), d, data)
    }

    /// `H(x) = { h(x) : h in H }`, in member order.
    pub fn evaluate_class(&self, raw: &[X]) -> Result<Vec<Configuration>> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        (0..self.size()).map(|j| self.evaluate_member(j, raw)).collect()
    }

    /// Concatenates two classes over the same domain.
    pub fn union(mut self, other: &FunctionClass<X>) -> Self {
        self.labels.extend(other.labels.iter().cloned());
        self.members.extend(other.members.iter().cloned());
        self
    }
}

impl FunctionClass<Vec<f64>> {
    /// Scalar linear maps `x -> clamp(<w, x>)` into a one-dimensional domain.
    pub fn linear(weights: &[Vec<f64>], domain: Domain) -> Result<Self> {
        if domain.dim() != 1 {
            return Err(Error::Dimension {
                expected: 1,
                actual: domain.dim(),
            });
        }
        let (lo, hi) = (domain.lower()[0], domain.upper()[0]);
        let mut class = FunctionClass::new(domain);
        for (j, w) in weights.iter().enumerate() {
            let w = w.clone();
            class.push(format!("linear[{j}]"), move |x: &Vec<f64>| {
                let s: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
                vec![s.clamp(lo, hi)]
            });
        }
        Ok(class)
    }

    /// The single member `x -> x`.
    pub fn identity(domain: Domain) -> Self {
        FunctionClass::new(domain).with_member("identity", |x: &Vec<f64>| x.clone())
    }
}

/// Draws the raw datum at each sample position.
///
/// The position index lets a sampler produce independent but not identically
/// distributed samples, like the two-block ranking layout.
pub trait RawSampler<X>: Send + Sync {
    fn sample(&self, index: usize, n: usize, rng: &mut SeededRng) -> X;

    fn sample_n(&self, n: usize, rng: &mut SeededRng) -> Vec<X> {
        (0..n).map(|i| self.sample(i, n, rng)).collect()
    }
}

impl<X, S: RawSampler<X> + ?Sized> RawSampler<X> for Arc<S> {
    fn sample(&self, index: usize, n: usize, rng: &mut SeededRng) -> X {
        (**self).sample(index, n, rng)
    }
}

impl<X, S: RawSampler<X> + ?Sized> RawSampler<X> for &S {
    fn sample(&self, index: usize, n: usize, rng: &mut SeededRng) -> X {
        (**self).sample(index, n, rng)
    }
}

/// Uniform draws from a box.
#[derive(Debug, Clone)]
pub struct UniformBox(pub Domain);

impl RawSampler<Vec<f64>> for UniformBox {
    fn sample(&self, _index: usize, _n: usize, rng: &mut SeededRng) -> Vec<f64> {
        self.0.sample_point(rng)
    }
}

/// Independent normal coordinates `mean_i + sd * N(0,1)`, clamped to `[-clip, clip]`.
#[derive(Debug, Clone)]
pub struct ClippedGaussian {
    pub mean: Vec<f64>,
    pub sd: f64,
    pub clip: f64,
}

impl RawSampler<Vec<f64>> for ClippedGaussian {
    fn sample(&self, _index: usize, _n: usize, rng: &mut SeededRng) -> Vec<f64> {
        self.mean
            .iter()
            .map(|m| {
                let z: f64 = rng.sample(StandardNormal);
                (m + self.sd * z).clamp(-self.clip, self.clip)
            })
            .collect()
    }
}

/// A constant datum, for degenerate and closed-form test cases.
#[derive(Debug, Clone)]
pub struct ConstantSampler<X>(pub X);

impl<X: Clone + Send + Sync> RawSampler<X> for ConstantSampler<X> {
    fn sample(&self, _index: usize, _n: usize, _rng: &mut SeededRng) -> X {
        self.0.clone()
    }
}

/// First half of the sample from `positive`, second half from `negative`.
#[derive(Debug, Clone)]
pub struct TwoBlock<P, N> {
    pub positive: P,
    pub negative: N,
}

impl<X, P: RawSampler<X>, N: RawSampler<X>> RawSampler<X> for TwoBlock<P, N> {
    fn sample(&self, index: usize, n: usize, rng: &mut SeededRng) -> X {
        if index < n / 2 {
            self.positive.sample(index, n, rng)
        } else {
            self.negative.sample(index, n, rng)
        }
    }
}

/// Closure-backed sampler.
pub struct FnSampler<F>(pub F);

impl<X, F> RawSampler<X> for FnSampler<F>
where
    F: Fn(usize, usize, &mut SeededRng) -> X + Send + Sync,
{
    fn sample(&self, index: usize, n: usize, rng: &mut SeededRng) -> X {
        (self.0)(index, n, rng)
    }
}
