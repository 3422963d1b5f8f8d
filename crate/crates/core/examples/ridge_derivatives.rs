//! Finite-difference seminorm estimates for the ridge error functional:
//! doubling `n` roughly halves the first-order and quarters the mixed
//! estimate.

use weakstat::seminorms::derivative_seminorms;
use weakstat::statistics::{RidgeError, RidgeProblem};
use weakstat::{Result, SeededRng, Statistic};

fn main() -> Result<()> {
    let problem = RidgeProblem::new(0.5, 3)?;
    let mut previous: Option<(f64, f64)> = None;
    for n in [25, 50, 100] {
        let f = RidgeError::new(problem, n)?;
        let r = derivative_seminorms(&f, f.domain().diameter(), 16, 1e-4, &mut SeededRng::from_seed(n as u64))?;
        let d = r.derivative.expect("derivative details");
        print!("n = {n:>3}: max gradient {:.3e}, max mixed {:.3e}", d.max_gradient_norm, d.max_mixed_norm);
        if let Some((g, m)) = previous {
            print!("   ratios {:.2}, {:.2}", g / d.max_gradient_norm, m / d.max_mixed_norm);
        }
        println!();
        previous = Some((d.max_gradient_norm, d.max_mixed_norm));
    }
    Ok(())
}
