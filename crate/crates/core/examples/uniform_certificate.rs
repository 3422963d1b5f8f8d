//! A high-probability certificate for the mean over a finite linear class,
//! compared with a simulated expected deviation.

use weakstat::bounds::uniform_bound;
use weakstat::class::UniformBox;
use weakstat::complexity::{class_complexity, ComplexityKind};
use weakstat::oracle::sup_deviation_estimate;
use weakstat::statistics::MeanStatistic;
use weakstat::{Domain, FunctionClass, Result, SeededRng};

fn main() -> Result<()> {
    let n = 32;
    let domain = Domain::interval(-1.0, 1.0)?;
    let weights: Vec<Vec<f64>> = (0..16).map(|j| vec![-1.0 + 2.0 * j as f64 / 15.0]).collect();
    let class = FunctionClass::linear(&weights, domain.clone())?;
    let sampler = UniformBox(domain.clone());
    let f = MeanStatistic::new(n, domain)?;
    let mut rng = SeededRng::from_seed(3);

    let g = class_complexity(&class, &sampler, n, ComplexityKind::Gaussian, 64, 2048, &mut rng)?;
    let cert = uniform_bound(&f.analytic_seminorms(), &g, n, 0.05)?;
    let dev = sup_deviation_estimate(&f, &class, &sampler, 200, 256, &mut rng)?;
    println!("{}", serde_json::to_string_pretty(&cert)?);
    println!(
        "simulated E sup deviation {:.4}, symmetrization term {:.4}, total at delta = 0.05: {:.4}",
        dev.mean, cert.symmetrization_term, cert.total
    );
    Ok(())
}
