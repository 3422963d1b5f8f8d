//! Synthetic data for the clustering and ranking pipelines.
//!
//! * [`MixtureSpec`]: isotropic Gaussian blobs with a fraction of points
//!   replaced by uniform noise in a centered ball. Every point is projected
//!   into the ball, so squared-distance losses of centers in the ball stay
//!   in `[0, (2R)^2]`.
//! * [`RankingSpec`]: two populations of clipped Gaussian feature vectors in
//!   `[-1, 1]^p`, positives shifted by `+shift/2` and negatives by
//!   `-shift/2` in every coordinate. Larger shifts give larger attainable AUC.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::class::{ClippedGaussian, RawSampler, TwoBlock};
use crate::domain::Configuration;
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub centers: Vec<Vec<f64>>,
    pub sd: f64,
    /// Share of points drawn uniformly from the ball instead of a blob.
    pub noise_fraction: f64,
    pub ball_radius: f64,
}

impl MixtureSpec {
    /// Three planar blobs with 25% noise in the radius-5 disc.
    pub fn benchmark() -> Self {
        Self {
            centers: vec![vec![-2.0, -1.0], vec![2.0, -1.0], vec![0.0, 2.0]],
            sd: 0.4,
            noise_fraction: 0.25,
            ball_radius: 5.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.centers[0].len()
    }

    /// `round(noise_fraction * n)` noise points follow the blob points;
    /// blob membership is uniform.
    pub fn sample(&self, n: usize, rng: &mut SeededRng) -> Configuration {
        let rows = self.sample_n(n, rng);
        Configuration::from_rows(&rows).expect("positive shape")
    }

    fn noise_count(&self, n: usize) -> usize {
        ((self.noise_fraction * n as f64).round() as usize).min(n)
    }
}

impl RawSampler<Vec<f64>> for MixtureSpec {
    fn sample(&self, index: usize, n: usize, rng: &mut SeededRng) -> Vec<f64> {
        if index >= n - self.noise_count(n) {
            return uniform_in_ball(self.dim(), self.ball_radius, rng);
        }
        let c = &self.centers[rng.random_range(0..self.centers.len())];
        let mut p: Vec<f64> = c
            .iter()
            .map(|v| v + self.sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        project(&mut p, self.ball_radius);
        p
    }
}

fn project(p: &mut [f64], radius: f64) {
    let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > radius {
        p.iter_mut().for_each(|v| *v *= radius / norm);
    }
}

/// Uniform draw from the centered ball of radius `radius` in `R^m`.
pub fn uniform_in_ball(m: usize, radius: f64, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            let r = radius * rng.random::<f64>().powf(1.0 / m as f64);
            let mut p: Vec<f64> = dir.iter().map(|v| v * r / norm).collect();
            project(&mut p, radius);
            return p;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingSpec {
    pub dim: usize,
    pub shift: f64,
    pub sd: f64,
}

impl RankingSpec {
    /// First half positives, second half negatives.
    pub fn sampler(&self) -> TwoBlock<ClippedGaussian, ClippedGaussian> {
        let block = |mean: f64| ClippedGaussian {
            mean: vec![mean; self.dim],
            sd: self.sd,
            clip: 1.0,
        };
        TwoBlock {
            positive: block(self.shift / 2.0),
            negative: block(-self.shift / 2.0),
        }
    }
}
