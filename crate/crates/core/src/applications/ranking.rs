use serde::{Deserialize, Serialize};

use crate::bounds::auc_certificate;
use crate::class::{FunctionClass, RawSampler};
use crate::complexity::ComplexityEstimate;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::statistics::{smoothed_auc, wilcoxon_auc, LossFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingSelection {
    pub chosen_index: usize,
    pub empirical_auc: f64,
    pub certificate_lower_bound: f64,
    pub delta: f64,
    /// Smoothed statistic of every candidate, in class order.
    pub candidate_scores: Vec<f64>,
}

/// Scorers `x -> <w, x> / |w|_1` into `[-1, 1]`, for features in `[-1, 1]^p`.
pub fn linear_rankers(weights: &[Vec<f64>]) -> Result<FunctionClass<Vec<f64>>> {
    let normalized: Vec<Vec<f64>> = weights
        .iter()
        .map(|w| {
            let l1: f64 = w.iter().map(|v| v.abs()).sum();
            if l1 == 0.0 {
                return Err(Error::OutOfRange("ranker weight vector is zero".into()));
            }
            Ok(w.iter().map(|v| v / l1).collect())
        })
        .collect::<Result<_>>()?;
    FunctionClass::linear(&normalized, Domain::interval(-1.0, 1.0)?)
}

/// Picks the candidate maximizing the smoothed two-block statistic on
/// `data` (positives first), ties going to the lowest index, and attaches the
/// AUC lower confidence bound.
pub fn select_ranker<X>(
    candidates: &FunctionClass<X>,
    data: &[X],
    loss: &LossFunction,
    g: &ComplexityEstimate,
    delta: f64,
) -> Result<RankingSelection> {
    if !loss.below_indicator() {
        return Err(Error::Inapplicable(format!(
            "loss `{}` is not dominated by the strict indicator",
            loss.label()
        )));
    }
    if !data.len().is_multiple_of(2) || data.is_empty() {
        return Err(Error::Shape(format!("two-block sample needs even n, got {}", data.len())));
    }
    let scores: Vec<f64> = (0..candidates.size())
        .map(|j| smoothed_auc(loss, &candidates.evaluate_member(j, data)?))
        .collect::<Result<_>>()?;
    if scores.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut chosen = 0;
    for (j, s) in scores.iter().enumerate() {
        if *s > scores[chosen] {
            chosen = j;
        }
    }
    let empirical_auc = scores[chosen];
    let certificate_lower_bound = auc_certificate(empirical_auc, loss, data.len(), g, delta)?;
    Ok(RankingSelection {
        chosen_index: chosen,
        empirical_auc,
        certificate_lower_bound,
        delta,
        candidate_scores: scores,
    })
}

/// Exact Wilcoxon AUC of candidate `j` on a fresh two-block sample of size `n`.
pub fn held_out_auc<X>(
    candidates: &FunctionClass<X>,
    j: usize,
    sampler: &dyn RawSampler<X>,
    n: usize,
    rng: &mut SeededRng,
) -> Result<f64> {
    let raw = sampler.sample_n(n, rng);
    wilcoxon_auc(&candidates.evaluate_member(j, &raw)?)
}
