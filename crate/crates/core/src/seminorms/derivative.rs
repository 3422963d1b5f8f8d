use nalgebra::DMatrix;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::{SeminormMethod, SeminormReport};
use crate::domain::{Configuration, Statistic};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Finite-difference settings; steps are relative to the diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeOptions {
    pub first_step: f64,
    pub second_step: f64,
    /// Row pairs `(k, l)` examined per probe point for the mixed blocks.
    pub max_pairs: usize,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        Self {
            first_step: 1e-4,
            second_step: 1e-3,
            max_pairs: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeDetails {
    /// `max_k |d_k f|` over probes.
    pub max_gradient_norm: f64,
    /// `max_{k != l} |d_kl f|_op` over probes and sampled pairs.
    pub max_mixed_norm: f64,
    pub probes: usize,
    pub pairs_per_probe: usize,
    pub first_step: f64,
    pub second_step: f64,
}

/// Derivative-based seminorm estimates with second-order step `10 * step`.
///
/// Returns `m_lip = max |d_k f|` and `j_lip = n * diameter * max |d_kl f|`.
pub fn derivative_seminorms(
    f: &dyn Statistic,
    diameter: f64,
    probes: usize,
    step: f64,
    rng: &mut SeededRng,
) -> Result<SeminormReport> {
    let opts = DerivativeOptions {
        first_step: step,
        second_step: 10.0 * step,
        ..DerivativeOptions::default()
    };
    derivative_seminorms_with(f, diameter, probes, &opts, rng)
}

pub fn derivative_seminorms_with(
    f: &dyn Statistic,
    diameter: f64,
    probes: usize,
    opts: &DerivativeOptions,
    rng: &mut SeededRng,
) -> Result<SeminormReport> {
    if !(opts.first_step > 0.0 && opts.second_step > 0.0) {
        return Err(Error::Step("finite-difference steps must be positive".into()));
    }
    if probes == 0 {
        return Err(Error::ZeroBudget);
    }
    let n = f.n();
    let domain = f.domain();
    let d = domain.dim();
    let h1 = opts.first_step * diameter;
    let h2 = opts.second_step * diameter;
    let margin = h1.max(h2);
    let mut lower = Vec::with_capacity(d);
    let mut upper = Vec::with_capacity(d);
    for (lo, hi) in domain.lower().iter().zip(domain.upper()) {
        if hi - lo <= 2.0 * margin {
            return Err(Error::Step(format!(
                "stencil half-width {margin} does not fit in [{lo}, {hi}]"
            )));
        }
        lower.push(lo + margin);
        upper.push(hi - margin);
    }
    let inner = crate::domain::Domain::new(lower, upper)?;

    let all_pairs = n * n.saturating_sub(1);
    let pairs_per_probe = all_pairs.min(opts.max_pairs);
    let mut max_grad = 0.0f64;
    let mut max_mixed = 0.0f64;
    let mut x = Configuration::uniform(&inner, n, rng);
    for p in 0..probes {
        if p > 0 {
            x = Configuration::uniform(&inner, n, rng);
        }
        for k in 0..n {
            max_grad = max_grad.max(gradient_norm(f, &mut x, k, h1));
        }
        if pairs_per_probe > 0 {
            for idx in sample(rng, all_pairs, pairs_per_probe) {
                let k = idx / (n - 1);
                let mut l = idx % (n - 1);
                if l >= k {
                    l += 1;
                }
                max_mixed = max_mixed.max(mixed_norm(f, &mut x, k, l, h2));
            }
        }
    }

    let m_lip = max_grad;
    let j_lip = n as f64 * diameter * max_mixed;
    Ok(SeminormReport {
        m_lip,
        j_lip,
        m_plain: m_lip * diameter,
        j_plain: j_lip * diameter,
        method: SeminormMethod::DerivativeBound,
        search_evals: (probes * (2 * n * d + 4 * pairs_per_probe * d * d)) as u64,
        argmax_witness: None,
        interaction_witness: None,
        derivative: Some(DerivativeDetails {
            max_gradient_norm: max_grad,
            max_mixed_norm: max_mixed,
            probes,
            pairs_per_probe,
            first_step: opts.first_step,
            second_step: opts.second_step,
        }),
    })
}

/// Central-difference `|d_k f(x)|`; `x` is restored on return.
fn gradient_norm(f: &dyn Statistic, x: &mut Configuration, k: usize, h: f64) -> f64 {
    let d = x.dim();
    let mut sq = 0.0;
    for a in 0..d {
        let orig = x.row(k)[a];
        x.row_mut(k)[a] = orig + h;
        let up = f.evaluate(x);
        x.row_mut(k)[a] = orig - h;
        let down = f.evaluate(x);
        x.row_mut(k)[a] = orig;
        let g = (up - down) / (2.0 * h);
        sq += g * g;
    }
    sq.sqrt()
}

/// Operator norm of the central-difference block `d^2 f / dx_k dx_l`.
fn mixed_norm(f: &dyn Statistic, x: &mut Configuration, k: usize, l: usize, h: f64) -> f64 {
    let d = x.dim();
    let mut block = DMatrix::<f64>::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let (ka, lb) = (x.row(k)[a], x.row(l)[b]);
            let mut eval = |sa: f64, sb: f64| {
                x.row_mut(k)[a] = ka + sa * h;
                x.row_mut(l)[b] = lb + sb * h;
                f.evaluate(x)
            };
            let v = eval(1.0, 1.0) - eval(1.0, -1.0) - eval(-1.0, 1.0) + eval(-1.0, -1.0);
            x.row_mut(k)[a] = ka;
            x.row_mut(l)[b] = lb;
            block[(a, b)] = v / (4.0 * h * h);
        }
    }
    if d == 1 {
        block[(0, 0)].abs()
    } else {
        block.singular_values().max()
    }
}
