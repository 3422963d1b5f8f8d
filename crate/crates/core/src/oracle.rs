//! Numerical checks of the identities and inequalities behind the bounds.
//!
//! The telescoping decomposition `f(x) - f(x') = sum_k F_k(x, x')` with
//!
//! ```text
//! F_k(x, x') = 2^-k sum_{A subset [1, k-1]} ( D^k f(x^A) + D^k f(x^{A^c}) ),   D^k = D^k_{x_k x'_k}
//! ```
//!
//! where `x^A` takes rows in `A` from `x'` and the rest from `x`, is
//! evaluated by subset enumeration, so it is limited to `n <= 14`.
//! Indices are zero-based throughout.
//!
//! Every check produces a [`CheckRecord`] carrying a SHA-256 digest of its
//! inputs, the slack of the inequality and a pass flag.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::bounds::Direction;
use crate::class::{FunctionClass, RawSampler};
use crate::complexity::mean_and_sd;
use crate::domain::{Configuration, Statistic};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::seminorms::{distance, double_difference, partial_difference};
use crate::statistics::WeightFunction;

pub const MAX_ENUMERATION_N: usize = 14;
/// Relative tolerance for identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Absolute slack for inequalities.
pub const INEQUALITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs_digest: String,
    /// `rhs - lhs` for inequalities, `tolerance - residual` for identities.
    pub slack: f64,
    pub passed: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, inputs: &serde_json::Value, slack: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            inputs_digest: digest(inputs),
            slack,
            passed,
        }
    }
}

/// Hex SHA-256 of the compact JSON encoding of `value`.
pub fn digest(value: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(value).expect("JSON values always serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkDecomposition {
    pub n: usize,
    /// `F_k(x, x')` for `k = 0..n`.
    pub terms: Vec<f64>,
    /// The same terms with `x^{A^c}` replaced by `x^{A u [k, n)}`.
    pub alternative_terms: Vec<f64>,
    /// `f(x) - f(x')`
    pub lhs: f64,
    /// `|lhs - sum terms|`
    pub residual: f64,
    /// `|lhs - sum alternative_terms|`
    pub alternative_residual: f64,
}

impl FkDecomposition {
    /// Whether both residuals are within `IDENTITY_TOL * max(1, |lhs|)`.
    pub fn holds(&self) -> bool {
        let tol = IDENTITY_TOL * self.lhs.abs().max(1.0);
        self.residual <= tol && self.alternative_residual <= tol
    }

    pub fn record(&self, inputs: &serde_json::Value) -> CheckRecord {
        let tol = IDENTITY_TOL * self.lhs.abs().max(1.0);
        let worst = self.residual.max(self.alternative_residual);
        CheckRecord::new("fk_identity", inputs, tol - worst, self.holds())
    }
}

fn check_pair(f: &dyn Statistic, x: &Configuration, x_prime: &Configuration) -> Result<()> {
    let n = f.n();
    for c in [x, x_prime] {
        if c.n() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: c.n(),
            });
        }
        if c.dim() != f.domain().dim() {
            return Err(Error::Dimension {
                expected: f.domain().dim(),
                actual: c.dim(),
            });
        }
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::EnumerationBudget {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    Ok(())
}

/// Fills `scratch` with rows from `x_prime` where `from_prime(j)` holds.
fn mix(scratch: &mut Configuration, x: &Configuration, x_prime: &Configuration, from_prime: impl Fn(usize) -> bool) {
    for j in 0..x.n() {
        let src = if from_prime(j) { x_prime.row(j) } else { x.row(j) };
        scratch.set_row(j, src);
    }
}

fn diff_at_row(f: &dyn Statistic, scratch: &mut Configuration, k: usize, a: &[f64], b: &[f64]) -> f64 {
    scratch.set_row(k, a);
    let up = f.evaluate(scratch);
    scratch.set_row(k, b);
    let down = f.evaluate(scratch);
    up - down
}

/// `(F_k, F_k with the A u [k, n) form)`.
fn fk_pair(f: &dyn Statistic, x: &Configuration, x_prime: &Configuration, k: usize) -> (f64, f64) {
    let n = x.n();
    let (xk, xk_prime) = (x.row(k).to_vec(), x_prime.row(k).to_vec());
    let mut scratch = x.clone();
    let subsets = 1usize << k;
    let mut plain = Vec::with_capacity(subsets);
    let mut complement = Vec::with_capacity(subsets);
    let mut upper = Vec::with_capacity(subsets);
    for mask in 0..subsets {
        let in_a = |j: usize| j < k && (mask >> j) & 1 == 1;
        mix(&mut scratch, x, x_prime, in_a);
        plain.push(diff_at_row(f, &mut scratch, k, &xk, &xk_prime));
        mix(&mut scratch, x, x_prime, |j| !in_a(j));
        complement.push(diff_at_row(f, &mut scratch, k, &xk, &xk_prime));
        mix(&mut scratch, x, x_prime, |j| in_a(j) || j >= k);
        upper.push(diff_at_row(f, &mut scratch, k, &xk, &xk_prime));
    }
    debug_assert!(n > k);
    let scale = 0.5f64.powi(k as i32 + 1);
    let base = neumaier_sum(plain.iter().copied());
    let fk = scale * (base + neumaier_sum(complement));
    let alt = scale * (base + neumaier_sum(upper));
    (fk, alt)
}

/// A single term `F_k(x, x')`.
pub fn fk_term(f: &dyn Statistic, x: &Configuration, x_prime: &Configuration, k: usize) -> Result<f64> {
    check_pair(f, x, x_prime)?;
    if k >= x.n() {
        return Err(Error::Index { index: k, n: x.n() });
    }
    Ok(fk_pair(f, x, x_prime, k).0)
}

/// All terms of the decomposition of `f(x) - f(x')`, in both forms.
pub fn fk_decompose(f: &dyn Statistic, x: &Configuration, x_prime: &Configuration) -> Result<FkDecomposition> {
    check_pair(f, x, x_prime)?;
    let n = x.n();
    let (terms, alternative_terms): (Vec<f64>, Vec<f64>) = (0..n).map(|k| fk_pair(f, x, x_prime, k)).unzip();
    let lhs = f.evaluate(x) - f.evaluate(x_prime);
    let residual = (lhs - neumaier_sum(terms.iter().copied())).abs();
    let alternative_residual = (lhs - neumaier_sum(alternative_terms.iter().copied())).abs();
    Ok(FkDecomposition {
        n,
        terms,
        alternative_terms,
        lhs,
        residual,
        alternative_residual,
    })
}

/// Decomposes many pairs in parallel; output order follows input order.
pub fn fk_decompose_batch(
    f: &dyn Statistic,
    pairs: &[(Configuration, Configuration)],
) -> Result<Vec<FkDecomposition>> {
    pairs.par_iter().map(|(x, xp)| fk_decompose(f, x, xp)).collect()
}

/// The vector `v^k(x, x')` in `R^{2n}` (blocks of the row dimension `d`).
///
/// Block `k` holds `2M x_k`, block `n + k` holds `2M x'_k`, and every other
/// block `i` holds `J n^{-1/2}` times row `i` of `x` (for `i < n`) or of `x'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VkVector {
    pub k: usize,
    pub d: usize,
    /// Per-block scale factors, length `2n`.
    pub scales: Vec<f64>,
    /// Length `2n d`.
    pub values: Vec<f64>,
}

impl VkVector {
    pub fn new(x: &Configuration, x_prime: &Configuration, k: usize, m: f64, j: f64) -> Result<Self> {
        let n = x.n();
        if x_prime.n() != n || x_prime.dim() != x.dim() {
            return Err(Error::Dimension {
                expected: n,
                actual: x_prime.n(),
            });
        }
        if k >= n {
            return Err(Error::Index { index: k, n });
        }
        let off = j / (n as f64).sqrt();
        let mut scales = vec![off; 2 * n];
        scales[k] = 2.0 * m;
        scales[n + k] = 2.0 * m;
        let mut values = Vec::with_capacity(2 * n * x.dim());
        for (i, s) in scales.iter().enumerate() {
            let row = if i < n { x.row(i) } else { x_prime.row(i - n) };
            values.extend(row.iter().map(|v| s * v));
        }
        Ok(Self {
            k,
            d: x.dim(),
            scales,
            values,
        })
    }

    pub fn distance(&self, other: &VkVector) -> f64 {
        distance(&self.values, &other.values)
    }
}

/// `D^k_{ab} f(x) - D^k_{ab} f(x') <= (J/n) sum_{j != k} |x_j - x'_j|`
#[allow(clippy::too_many_arguments)]
pub fn jlip_lemma_check(
    f: &dyn Statistic,
    x: &Configuration,
    x_prime: &Configuration,
    k: usize,
    a: &[f64],
    b: &[f64],
    j_lip_bound: f64,
) -> Result<CheckRecord> {
    let lhs = partial_difference(f, x, k, a, b)? - partial_difference(f, x_prime, k, a, b)?;
    let spread: f64 = (0..x.n())
        .filter(|&j| j != k)
        .map(|j| distance(x.row(j), x_prime.row(j)))
        .sum();
    let rhs = if spread == 0.0 {
        0.0
    } else {
        j_lip_bound / x.n() as f64 * spread
    };
    let slack = rhs - lhs;
    let inputs = json!({"statistic": f.label(), "x": x, "x_prime": x_prime, "k": k, "a": a, "b": b, "j": j_lip_bound});
    Ok(CheckRecord::new("jlip_lemma", &inputs, slack, slack >= -INEQUALITY_TOL))
}

/// `F_k(x, x') - F_k(y, y') <= |v^k(x, x') - v^k(y, y')|`
#[allow(clippy::too_many_arguments)]
pub fn fk_difference_check(
    f: &dyn Statistic,
    x: &Configuration,
    x_prime: &Configuration,
    y: &Configuration,
    y_prime: &Configuration,
    k: usize,
    m_lip: f64,
    j_lip: f64,
) -> Result<CheckRecord> {
    let lhs = fk_term(f, x, x_prime, k)? - fk_term(f, y, y_prime, k)?;
    let vx = VkVector::new(x, x_prime, k, m_lip, j_lip)?;
    let vy = VkVector::new(y, y_prime, k, m_lip, j_lip)?;
    let slack = vx.distance(&vy) - lhs;
    let inputs = json!({
        "statistic": f.label(), "x": x, "x_prime": x_prime, "y": y, "y_prime": y_prime,
        "k": k, "m_lip": m_lip, "j_lip": j_lip,
    });
    Ok(CheckRecord::new("fk_difference", &inputs, slack, slack >= -INEQUALITY_TOL))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationEstimate {
    pub mean: f64,
    /// `None` for a single replicate.
    pub std_error: Option<f64>,
    pub replicates: usize,
    pub direction: Direction,
}

/// Monte-Carlo `E f(h(X'))` for every member, using the same `reps` fresh
/// samples across members.
pub fn population_values<X: Send + Sync>(
    f: &dyn Statistic,
    class: &FunctionClass<X>,
    sampler: &dyn RawSampler<X>,
    reps: usize,
    rng: &mut SeededRng,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::Replicates { min: 1, got: 0 });
    }
    let root = rng.fork();
    let n = f.n();
    let per_rep: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let raw = sampler.sample_n(n, &mut root.child(r as u64));
            Ok(class.evaluate_class(&raw)?.iter().map(|c| f.evaluate(c)).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..class.size())
        .map(|j| neumaier_sum(per_rep.iter().map(|v| v[j])) / reps as f64)
        .collect())
}

/// `sup_h (population_h - f(h(raw)))`, or with the difference flipped.
pub fn sup_deviation<X>(
    f: &dyn Statistic,
    class: &FunctionClass<X>,
    raw: &[X],
    population: &[f64],
    direction: Direction,
) -> Result<f64> {
    if population.len() != class.size() {
        return Err(Error::Dimension {
            expected: class.size(),
            actual: population.len(),
        });
    }
    let emp = class.evaluate_class(raw)?;
    Ok(emp
        .iter()
        .zip(population)
        .map(|(c, p)| match direction {
            Direction::PopMinusEmp => p - f.evaluate(c),
            Direction::EmpMinusPop => f.evaluate(c) - p,
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Estimate of `E sup_h (E f(h(X')) - f(h(X)))`.
///
/// Each outer replicate draws `X` and estimates every population value from
/// `pop_reps` fresh samples.
pub fn sup_deviation_estimate<X: Send + Sync>(
    f: &dyn Statistic,
    class: &FunctionClass<X>,
    sampler: &dyn RawSampler<X>,
    outer_reps: usize,
    pop_reps: usize,
    rng: &mut SeededRng,
) -> Result<DeviationEstimate> {
    if outer_reps == 0 {
        return Err(Error::Replicates { min: 1, got: 0 });
    }
    let root = rng.fork();
    let n = f.n();
    let values: Vec<f64> = (0..outer_reps)
        .into_par_iter()
        .map(|o| {
            let stream = root.child(o as u64);
            let raw = sampler.sample_n(n, &mut stream.child(0));
            let pop = population_values(f, class, sampler, pop_reps, &mut stream.child(1))?;
            sup_deviation(f, class, &raw, &pop, Direction::PopMinusEmp)
        })
        .collect::<Result<_>>()?;
    let (mean, sd) = mean_and_sd(&values);
    Ok(DeviationEstimate {
        mean,
        std_error: (outer_reps > 1).then(|| sd / (outer_reps as f64).sqrt()),
        replicates: outer_reps,
        direction: Direction::PopMinusEmp,
    })
}

/// Length of `[[a, b]] n [[c, d]]`, with the empty set having length 0.
pub fn interval_overlap(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let lo = a.min(b).max(c.min(d));
    let hi = a.max(b).min(c.max(d));
    (hi - lo).max(0.0)
}

/// Both first- and second-order conditions on `L_F` at one probe.
///
/// First: `|D^k_{yy'} L_F(x)| <= |F|_inf |y - y'| / n`.
/// Second: `|D^l_{zz'} D^k_{yy'} L_F(x)| <= |F|_Lip diam([[z, z']] n [[y, y']]) / n^2`.
#[allow(clippy::too_many_arguments)]
pub fn lstat_condition_check(
    weight: &WeightFunction,
    x: &Configuration,
    k: usize,
    l: usize,
    y: f64,
    y_prime: f64,
    z: f64,
    z_prime: f64,
) -> Result<(CheckRecord, CheckRecord)> {
    let n = x.n();
    x.scalars()?;
    let f = crate::statistics::LStatistic::new(weight.clone(), n, crate::domain::Domain::unit(1))?;
    let nf = n as f64;
    let first = partial_difference(&f, x, k, &[y], &[y_prime])?.abs();
    let first_bound = if y == y_prime { 0.0 } else { weight.sup_norm() * (y - y_prime).abs() / nf };
    let second = double_difference(&f, x, k, l, &[y], &[y_prime], &[z], &[z_prime])?.abs();
    let overlap = interval_overlap(y, y_prime, z, z_prime);
    let second_bound = if overlap == 0.0 || weight.lip_norm() == 0.0 {
        0.0
    } else {
        weight.lip_norm() * overlap / (nf * nf)
    };
    let inputs = json!({
        "weight": weight.label(), "x": x, "k": k, "l": l,
        "y": y, "y_prime": y_prime, "z": z, "z_prime": z_prime,
    });
    let s1 = first_bound - first;
    let s2 = second_bound - second;
    Ok((
        CheckRecord::new("lstat_first_order", &inputs, s1, s1 >= -INEQUALITY_TOL),
        CheckRecord::new("lstat_second_order", &inputs, s2, s2 >= -INEQUALITY_TOL),
    ))
}
