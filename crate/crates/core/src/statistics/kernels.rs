use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::domain::{Configuration, Domain};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

type KernelFn = Arc<dyn Fn(&[&[f64]]) -> f64 + Send + Sync>;
type IndexedKernelFn = Arc<dyn Fn(&[usize], &[&[f64]]) -> f64 + Send + Sync>;

/// A kernel `kappa: U^m -> R` with its coordinate-wise Lipschitz constant
/// `L` and range bound `B >= M(kappa)`.
#[derive(Clone)]
pub struct Kernel {
    arity: usize,
    lipschitz: f64,
    range: f64,
    eval: KernelFn,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("arity", &self.arity)
            .field("lipschitz", &self.lipschitz)
            .field("range", &self.range)
            .finish()
    }
}

impl Kernel {
    pub fn new<F>(arity: usize, lipschitz: f64, range: f64, f: F) -> Result<Self>
    where
        F: Fn(&[&[f64]]) -> f64 + Send + Sync + 'static,
    {
        if arity == 0 {
            return Err(Error::OutOfRange("kernel arity must be positive".into()));
        }
        if !(lipschitz >= 0.0) || !(range >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "kernel constants must be nonnegative (L = {lipschitz}, B = {range})"
            )));
        }
        Ok(Self {
            arity,
            lipschitz,
            range,
            eval: Arc::new(f),
        })
    }

    /// `kappa(a_1, ..., a_m) = prod_i a_i` on scalars in `[0, 1]` (L = B = 1).
    pub fn product(arity: usize) -> Self {
        Self::new(arity, 1.0, 1.0, |args: &[&[f64]]| args.iter().map(|a| a[0]).product())
            .expect("arity checked by caller")
    }

    /// `kappa(a) = a_0` on `[0, 1]`.
    pub fn identity() -> Self {
        Self::new(1, 1.0, 1.0, |args: &[&[f64]]| args[0][0]).expect("valid")
    }

    pub fn zero(arity: usize) -> Self {
        Self::new(arity, 0.0, 0.0, |_: &[&[f64]]| 0.0).expect("valid")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn evaluate(&self, args: &[&[f64]]) -> f64 {
        (self.eval)(args)
    }

    /// Largest ratio `|kappa(.., y, ..) - kappa(.., y', ..)| / |y - y'|` seen
    /// over random probes on `domain`.
    pub fn probe_lipschitz(&self, domain: &Domain, probes: usize, rng: &mut SeededRng) -> f64 {
        let mut worst = 0.0_f64;
        for _ in 0..probes {
            let pts: Vec<Vec<f64>> = (0..self.arity).map(|_| domain.sample_point(rng)).collect();
            let slot = rng.random_range(0..self.arity);
            let y2 = domain.sample_point(rng);
            let dist = dist(&pts[slot], &y2);
            if dist < 1e-12 {
                continue;
            }
            let mut alt = pts.clone();
            alt[slot] = y2;
            let a: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
            let b: Vec<&[f64]> = alt.iter().map(|p| p.as_slice()).collect();
            worst = worst.max((self.evaluate(&a) - self.evaluate(&b)).abs() / dist);
        }
        worst
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The family `{kappa_j}` indexed by multi-indices `j`.
#[derive(Clone)]
pub enum KernelFamily {
    /// One kernel for every multi-index.
    Shared(Kernel),
    /// A kernel chosen per multi-index (zero-based indices).
    Indexed {
        arity: usize,
        lipschitz: f64,
        range: f64,
        eval: IndexedKernelFn,
    },
}

impl fmt::Debug for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelFamily::Shared(k) => f.debug_tuple("Shared").field(k).finish(),
            KernelFamily::Indexed {
                arity,
                lipschitz,
                range,
                ..
            } => f
                .debug_struct("Indexed")
                .field("arity", arity)
                .field("lipschitz", lipschitz)
                .field("range", range)
                .finish(),
        }
    }
}

impl From<Kernel> for KernelFamily {
    fn from(k: Kernel) -> Self {
        KernelFamily::Shared(k)
    }
}

impl KernelFamily {
    pub fn indexed<F>(arity: usize, lipschitz: f64, range: f64, f: F) -> Self
    where
        F: Fn(&[usize], &[&[f64]]) -> f64 + Send + Sync + 'static,
    {
        KernelFamily::Indexed {
            arity,
            lipschitz,
            range,
            eval: Arc::new(f),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            KernelFamily::Shared(k) => k.arity,
            KernelFamily::Indexed { arity, .. } => *arity,
        }
    }

    /// Worst-case Lipschitz constant over the family.
    pub fn lipschitz(&self) -> f64 {
        match self {
            KernelFamily::Shared(k) => k.lipschitz,
            KernelFamily::Indexed { lipschitz, .. } => *lipschitz,
        }
    }

    /// Worst-case range bound over the family.
    pub fn range(&self) -> f64 {
        match self {
            KernelFamily::Shared(k) => k.range,
            KernelFamily::Indexed { range, .. } => *range,
        }
    }

    fn eval(&self, index: &[usize], args: &[&[f64]]) -> f64 {
        match self {
            KernelFamily::Shared(k) => k.evaluate(args),
            KernelFamily::Indexed { eval, .. } => eval(index, args),
        }
    }
}

fn check_arity(kernels: &KernelFamily, x: &Configuration) -> Result<usize> {
    let m = kernels.arity();
    if m > x.n() {
        return Err(Error::Arity { arity: m, n: x.n() });
    }
    Ok(m)
}

/// `n^{-m} sum_{j in [n]^m} kappa_j(x_{j_1}, ..., x_{j_m})`
pub fn v_statistic(kernels: &KernelFamily, x: &Configuration) -> Result<f64> {
    let m = check_arity(kernels, x)?;
    let n = x.n();
    let mut index = vec![0usize; m];
    let mut args: Vec<&[f64]> = vec![x.row(0); m];
    let mut sum = 0.0;
    loop {
        for (slot, &i) in index.iter().enumerate() {
            args[slot] = x.row(i);
        }
        sum += kernels.eval(&index, &args);
        // odometer
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(sum / (n as f64).powi(m as i32));
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < n {
                break;
            }
            index[pos] = 0;
        }
    }
}

/// `binom(n, m)^{-1} sum_{j_1 < ... < j_m} kappa_j(x_{j_1}, ..., x_{j_m})`
pub fn u_statistic(kernels: &KernelFamily, x: &Configuration) -> Result<f64> {
    let m = check_arity(kernels, x)?;
    let n = x.n();
    let mut index: Vec<usize> = (0..m).collect();
    let mut args: Vec<&[f64]> = vec![x.row(0); m];
    let mut sum = 0.0;
    let mut count = 0u64;
    loop {
        for (slot, &i) in index.iter().enumerate() {
            args[slot] = x.row(i);
        }
        sum += kernels.eval(&index, &args);
        count += 1;
        // next combination in lexicographic order
        let mut pos = m;
        loop {
            if pos == 0 {
                debug_assert_eq!(count as f64, binomial(n, m));
                return Ok(sum / binomial(n, m));
            }
            pos -= 1;
            if index[pos] < n - m + pos {
                index[pos] += 1;
                for later in pos + 1..m {
                    index[later] = index[later - 1] + 1;
                }
                break;
            }
        }
    }
}

pub(crate) fn binomial(n: usize, m: usize) -> f64 {
    let m = m.min(n - m);
    (0..m).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
