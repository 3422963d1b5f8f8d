//! Trimmed K-means against standard K-means on blobs with uniform noise.

use weakstat::applications::synthetic::MixtureSpec;
use weakstat::applications::{center_recovery_error, kmeans, trimmed_kmeans, KMeansOptions};
use weakstat::{Result, SeededRng};

fn main() -> Result<()> {
    let spec = MixtureSpec::benchmark();
    let opts = KMeansOptions::default();
    let (mut trimmed_wins, seeds) = (0, 20);
    for seed in 0..seeds {
        let mut rng = SeededRng::from_seed(seed);
        let data = spec.sample(300, &mut rng);
        let t = trimmed_kmeans(&data, 3, 0.125, &opts, &mut rng)?;
        let s = kmeans(&data, 3, &opts, &mut rng)?;
        let (et, es) = (center_recovery_error(&t.centers, &spec.centers)?, center_recovery_error(&s.centers, &spec.centers)?);
        trimmed_wins += usize::from(et < es);
        println!("seed {seed:>2}: trimmed {et:.3}  standard {es:.3}");
    }
    println!("trimmed closer in {trimmed_wins}/{seeds} seeds");
    Ok(())
}
