//! The telescoping identity `f(x) - f(x') = sum_k F_k(x, x')` for a
//! U-statistic, term by term.

use weakstat::oracle::fk_decompose;
use weakstat::statistics::{Kernel, UStatistic};
use weakstat::{Configuration, Domain, Result, SeededRng};

fn main() -> Result<()> {
    let domain = Domain::unit(1);
    let f = UStatistic::new(Kernel::product(2), 6, domain.clone())?;
    let mut rng = SeededRng::from_seed(8);
    let x = Configuration::uniform(&domain, 6, &mut rng);
    let x_prime = Configuration::uniform(&domain, 6, &mut rng);
    let d = fk_decompose(&f, &x, &x_prime)?;
    for (k, t) in d.terms.iter().enumerate() {
        println!("F_{k} = {t:+.6e}");
    }
    println!("f(x) - f(x') = {:+.6e}, residual {:.2e} (alternative form {:.2e})", d.lhs, d.residual, d.alternative_residual);
    Ok(())
}
