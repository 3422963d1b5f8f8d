use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{uniform_bound, BoundCertificate};
use crate::complexity::ComplexityEstimate;
use crate::domain::Configuration;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::seminorms::analytic_seminorms_lstat;
use crate::statistics::{squared_distance, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansOptions {
    pub max_iters: usize,
    pub restarts: usize,
    /// Stop once the objective changes by less than this.
    pub tolerance: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            max_iters: 100,
            restarts: 10,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub centers: Vec<Vec<f64>>,
    /// `L_F` of the sorted losses at the returned centers.
    pub objective: f64,
    pub iterations: usize,
    pub restarts_used: usize,
    /// Index of the winning restart.
    pub best_restart: usize,
    /// Objective before the first update and after every iteration of the
    /// winning restart.
    pub history: Vec<f64>,
}

/// Rank-weighted K-means with the trimming weight `F_zeta`.
pub fn trimmed_kmeans(
    data: &Configuration,
    k: usize,
    zeta: f64,
    opts: &KMeansOptions,
    rng: &mut SeededRng,
) -> Result<ClusteringResult> {
    weighted_rank_kmeans(data, &WeightFunction::f_zeta(zeta)?, k, opts, rng)
}

/// Standard K-means, i.e. constant weight 1.
pub fn kmeans(data: &Configuration, k: usize, opts: &KMeansOptions, rng: &mut SeededRng) -> Result<ClusteringResult> {
    weighted_rank_kmeans(data, &WeightFunction::constant(1.0), k, opts, rng)
}

/// Minimizes `L_F(l(c, x_1), ..., l(c, x_n))` over `K` centers, where
/// `l(c, x) = min_j |x - c_j|^2`, by alternating rank weights and weighted
/// means.
///
/// Each iteration freezes the weights `F(rank_i / n)` of the current losses,
/// moves every center to the weighted mean of its points (zero-weight points
/// drop out), then re-sorts. A cluster with no weighted mass is reseeded at
/// the point with the largest weighted loss. For nonincreasing `F` the
/// recorded objective cannot increase; an increase aborts the run.
pub fn weighted_rank_kmeans(
    data: &Configuration,
    weight: &WeightFunction,
    k: usize,
    opts: &KMeansOptions,
    rng: &mut SeededRng,
) -> Result<ClusteringResult> {
    if k == 0 {
        return Err(Error::Shape("K must be at least 1".into()));
    }
    if k > data.n() {
        return Err(Error::Shape(format!("K = {k} exceeds the {} data points", data.n())));
    }
    if opts.restarts == 0 {
        return Err(Error::Replicates { min: 1, got: 0 });
    }
    let root = rng.fork();
    let runs: Vec<RestartRun> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| run_restart(data, weight, k, opts, r, &mut root.child(r as u64)))
        .collect::<Result<_>>()?;
    let (best_restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.objective < a.1.objective { b } else { a })
        .expect("at least one restart");
    Ok(ClusteringResult {
        centers: best.centers,
        objective: best.objective,
        iterations: best.history.len() - 1,
        restarts_used: opts.restarts,
        best_restart,
        history: best.history,
    })
}

struct RestartRun {
    centers: Vec<Vec<f64>>,
    objective: f64,
    history: Vec<f64>,
}

fn nearest(centers: &[Vec<f64>], p: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = squared_distance(c, p);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn seed_centers(data: &Configuration, k: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let n = data.n();
    let mut centers = vec![data.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = data.rows().map(|p| squared_distance(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, d) in d2.iter().enumerate() {
                if u < *d {
                    pick = i;
                    break;
                }
                u -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        let c = data.row(idx).to_vec();
        for (i, p) in data.rows().enumerate() {
            d2[i] = d2[i].min(squared_distance(p, &c));
        }
        centers.push(c);
    }
    centers
}

struct Assignment {
    cluster: Vec<usize>,
    loss: Vec<f64>,
    omega: Vec<f64>,
    objective: f64,
}

fn assign(data: &Configuration, centers: &[Vec<f64>], weight: &WeightFunction) -> Assignment {
    let n = data.n();
    let (cluster, loss): (Vec<usize>, Vec<f64>) = data.rows().map(|p| nearest(centers, p)).unzip();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| loss[*a].total_cmp(&loss[*b]));
    let mut omega = vec![0.0; n];
    let mut objective = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        omega[i] = weight.evaluate((rank + 1) as f64 / n as f64);
        objective += omega[i] * loss[i];
    }
    Assignment {
        cluster,
        loss,
        omega,
        objective: objective / n as f64,
    }
}

fn run_restart(
    data: &Configuration,
    weight: &WeightFunction,
    k: usize,
    opts: &KMeansOptions,
    restart: usize,
    rng: &mut SeededRng,
) -> Result<RestartRun> {
    let m = data.dim();
    let mut centers = seed_centers(data, k, rng);
    let mut current = assign(data, &centers, weight);
    let mut history = vec![current.objective];
    for iteration in 0..opts.max_iters {
        let mut sums = vec![vec![0.0; m]; k];
        let mut mass = vec![0.0; k];
        for (i, p) in data.rows().enumerate() {
            let w = current.omega[i];
            if w > 0.0 {
                let c = current.cluster[i];
                mass[c] += w;
                for ((s, v), o) in sums[c].iter_mut().zip(p).zip(&centers[c]) {
                    *s += w * (v - o);
                }
            }
        }
        for c in 0..k {
            if mass[c] > 0.0 {
                for (o, s) in centers[c].iter_mut().zip(&sums[c]) {
                    *o += s / mass[c];
                }
            } else {
                let pick = (0..data.n())
                    .max_by(|a, b| {
                        let (wa, wb) = (current.omega[*a] * current.loss[*a], current.omega[*b] * current.loss[*b]);
                        wa.total_cmp(&wb).then(current.loss[*a].total_cmp(&current.loss[*b])).then(b.cmp(a))
                    })
                    .expect("data is nonempty");
                centers[c] = data.row(pick).to_vec();
                current.loss[pick] = 0.0;
                current.omega[pick] = 0.0;
            }
        }
        let next = assign(data, &centers, weight);
        let previous = current.objective;
        if next.objective > previous + 1e-12 * previous.abs().max(1.0) {
            return Err(Error::DescentViolation {
                restart,
                iteration,
                previous,
                current: next.objective,
            });
        }
        history.push(next.objective);
        current = next;
        if (previous - current.objective).abs() < opts.tolerance {
            break;
        }
    }
    Ok(RestartRun {
        centers,
        objective: current.objective,
        history,
    })
}

/// Mean distance between matched centers under the best one-to-one matching.
///
/// Matching is by exhaustive search over permutations, so `K` is capped at 8.
pub fn center_recovery_error(found: &[Vec<f64>], truth: &[Vec<f64>]) -> Result<f64> {
    if found.len() != truth.len() || found.is_empty() {
        return Err(Error::Shape(format!(
            "cannot match {} centers against {}",
            found.len(),
            truth.len()
        )));
    }
    let k = found.len();
    if k > 8 {
        return Err(Error::EnumerationBudget { n: k, max: 8 });
    }
    let cost: Vec<Vec<f64>> = found
        .iter()
        .map(|a| truth.iter().map(|b| squared_distance(a, b).sqrt()).collect())
        .collect();
    let best = (0..k)
        .permutations(k)
        .map(|perm| perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(best / k as f64)
}

/// Uniform bound for the rank-weighted objective over all center sets in
/// a ball of radius `ball_radius`, so that losses lie in `[0, (2 R)^2]`.
///
/// `g` is the Gaussian average of the loss class. The returned certificate
/// bounds the expected objective minus the empirical one; add its total to
/// `result.objective` for a guarantee on the returned centers.
pub fn clustering_certificate(
    result: &ClusteringResult,
    ball_radius: f64,
    zeta: f64,
    n: usize,
    g: &ComplexityEstimate,
    delta: f64,
) -> Result<BoundCertificate> {
    if zeta == 0.0 {
        return Err(Error::UnboundedLipschitz);
    }
    let weight = WeightFunction::f_zeta(zeta)?;
    if !(ball_radius > 0.0) {
        return Err(Error::OutOfRange(format!("ball radius {ball_radius} must be positive")));
    }
    let outside = result
        .centers
        .iter()
        .any(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt() > ball_radius * (1.0 + 1e-12));
    if outside {
        return Err(Error::OutOfRange("a center lies outside the ball".into()));
    }
    let diameter = (2.0 * ball_radius).powi(2);
    let report = analytic_seminorms_lstat(&weight, diameter, n);
    uniform_bound(&report, g, n, delta)
}
