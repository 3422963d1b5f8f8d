//! Empirical interaction seminorms of three statistics next to their
//! closed-form upper bounds.

use weakstat::seminorms::empirical_seminorms;
use weakstat::statistics::{Kernel, LStatistic, LossFunction, MeanStatistic, SmoothedAuc, UStatistic, WeightFunction};
use weakstat::{Domain, Result, SeededRng, SeminormReport, Statistic};

fn show(f: &dyn Statistic, bound: &SeminormReport, rng: &mut SeededRng) -> Result<()> {
    let found = empirical_seminorms(f, 50_000, rng)?;
    println!(
        "{:<14} m_lip {:.5} <= {:.5}   j_lip {:.5} <= {:.5}   ({} evals)",
        f.label(),
        found.m_lip,
        bound.m_lip,
        found.j_lip,
        bound.j_lip,
        found.search_evals
    );
    Ok(())
}

fn main() -> Result<()> {
    let mut rng = SeededRng::from_seed(11);
    let mean = MeanStatistic::new(16, Domain::unit(1))?;
    show(&mean, &mean.analytic_seminorms(), &mut rng)?;
    let auc = SmoothedAuc::new(LossFunction::ramp(), 8, Domain::unit(1))?;
    show(&auc, &auc.analytic_seminorms(), &mut rng)?;
    let u = UStatistic::new(Kernel::product(2), 8, Domain::unit(1))?;
    show(&u, &u.analytic_seminorms(), &mut rng)?;
    let trimmed = LStatistic::new(WeightFunction::f_zeta(0.25)?, 8, Domain::unit(1))?;
    show(&trimmed, &trimmed.analytic_seminorms(), &mut rng)?;
    Ok(())
}
