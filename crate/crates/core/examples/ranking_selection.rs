//! Picks one of eight linear rankers by the smoothed Wilcoxon statistic
//! and compares the certified lower bound with held-out AUC.

use rand::Rng;
use weakstat::applications::synthetic::RankingSpec;
use weakstat::applications::{held_out_auc, linear_rankers, select_ranker};
use weakstat::class::RawSampler;
use weakstat::complexity::{class_complexity, ComplexityKind};
use weakstat::statistics::LossFunction;
use weakstat::{Result, SeededRng};

fn main() -> Result<()> {
    let spec = RankingSpec { dim: 3, shift: 0.6, sd: 0.6 };
    let sampler = spec.sampler();
    let mut rng = SeededRng::from_seed(21);
    let weights: Vec<Vec<f64>> = (0..8).map(|_| (0..3).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
    let class = linear_rankers(&weights)?;
    let n = 200;
    let g = class_complexity(&class, &sampler, n, ComplexityKind::Gaussian, 32, 1024, &mut rng)?;
    let data = sampler.sample_n(n, &mut rng);
    let sel = select_ranker(&class, &data, &LossFunction::ramp(), &g, 0.1)?;
    let held = held_out_auc(&class, sel.chosen_index, &sampler, 4000, &mut rng)?;
    println!("chosen ranker {} with weights {:?}", sel.chosen_index, weights[sel.chosen_index]);
    println!("smoothed statistic {:.4}, certified AUC >= {:.4}, held-out AUC {:.4}", sel.empirical_auc, sel.certificate_lower_bound, held);
    Ok(())
}
