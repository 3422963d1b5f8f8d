//! Monte-Carlo Gaussian and Rademacher averages: a closed-form set and an
//! evaluated linear class.

use weakstat::class::UniformBox;
use weakstat::complexity::{class_complexity, gaussian_average, rademacher_average, ComplexityKind};
use weakstat::{Domain, FunctionClass, Result, SeededRng};

fn main() -> Result<()> {
    let mut rng = SeededRng::from_seed(5);
    let set = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
    let g = gaussian_average(&set, 100_000, &mut rng)?;
    let r = rademacher_average(&set, 1_000, &mut rng)?;
    println!("G({{e1, -e1}}) = {:.4} +- {:.4}  (sqrt(2/pi) = {:.4})", g.mean, g.std_error, (2.0 / std::f64::consts::PI).sqrt());
    println!("R({{e1, -e1}}) = {}", r.mean);

    let weights: Vec<Vec<f64>> = (0..16).map(|j| vec![-1.0 + 2.0 * j as f64 / 15.0]).collect();
    let class = FunctionClass::linear(&weights, Domain::interval(-1.0, 1.0)?)?;
    let sampler = UniformBox(Domain::interval(-1.0, 1.0)?);
    for n in [8, 32, 128] {
        let est = class_complexity(&class, &sampler, n, ComplexityKind::Gaussian, 64, 1024, &mut rng)?;
        println!("n = {n:>3}: E G(H(X)) = {:.3} +- {:.3}", est.mean, est.std_error);
    }
    Ok(())
}
