//! [`Statistic`] wrappers with fixed sample size and domain.
//!
//! Constructors validate shapes; `evaluate` panics if handed a configuration
//! of the wrong shape, since that is a caller bug rather than a data error.

use crate::domain::{Configuration, Domain, Statistic};
use crate::error::{Error, Result};
use crate::seminorms::{self, SeminormReport};

use super::{
    l_statistic, ridge_error, sample_mean, smoothed_auc, u_statistic, v_statistic, KernelFamily, LossFunction,
    RidgeProblem, WeightFunction,
};

fn require_scalar(domain: &Domain) -> Result<()> {
    if domain.dim() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            actual: domain.dim(),
        });
    }
    Ok(())
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Shape("sample size must be positive".into()));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MeanStatistic {
    n: usize,
    domain: Domain,
}

impl MeanStatistic {
    pub fn new(n: usize, domain: Domain) -> Result<Self> {
        require_n(n)?;
        require_scalar(&domain)?;
        Ok(Self { n, domain })
    }

    /// `M_Lip = 1/n`, `J_Lip = 0`, `M = diam/n`.
    pub fn analytic_seminorms(&self) -> SeminormReport {
        seminorms::analytic_seminorms_mean(self.domain.diameter(), self.n)
    }
}

impl Statistic for MeanStatistic {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn label(&self) -> &str {
        "mean"
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        sample_mean(x).expect("mean needs a one-dimensional configuration")
    }
}

macro_rules! kernel_statistic {
    ($name:ident, $label:literal, $eval:ident, $kind:expr) => {
        #[derive(Debug, Clone)]
        pub struct $name {
            n: usize,
            domain: Domain,
            kernels: KernelFamily,
        }

        impl $name {
            pub fn new(kernels: impl Into<KernelFamily>, n: usize, domain: Domain) -> Result<Self> {
                require_n(n)?;
                let kernels = kernels.into();
                if kernels.arity() > n {
                    return Err(Error::Arity {
                        arity: kernels.arity(),
                        n,
                    });
                }
                Ok(Self { n, domain, kernels })
            }

            pub fn kernels(&self) -> &KernelFamily {
                &self.kernels
            }

            pub fn analytic_seminorms(&self) -> SeminormReport {
                seminorms::analytic_seminorms_ustat(
                    self.kernels.lipschitz(),
                    self.kernels.range(),
                    self.kernels.arity(),
                    self.n,
                    $kind,
                )
                .expect("arity checked at construction")
            }
        }

        impl Statistic for $name {
            fn n(&self) -> usize {
                self.n
            }
            fn domain(&self) -> &Domain {
                &self.domain
            }
            fn label(&self) -> &str {
                $label
            }
            fn evaluate(&self, x: &Configuration) -> f64 {
                $eval(&self.kernels, x).expect("arity checked at construction")
            }
        }
    };
}

kernel_statistic!(UStatistic, "u_statistic", u_statistic, seminorms::KernelAverage::U);
kernel_statistic!(VStatistic, "v_statistic", v_statistic, seminorms::KernelAverage::V);

/// The smoothed two-block Wilcoxon statistic.
#[derive(Debug, Clone)]
pub struct SmoothedAuc {
    n: usize,
    domain: Domain,
    loss: LossFunction,
}

impl SmoothedAuc {
    pub fn new(loss: LossFunction, n: usize, domain: Domain) -> Result<Self> {
        require_n(n)?;
        require_scalar(&domain)?;
        if !n.is_multiple_of(2) {
            return Err(Error::Shape(format!("two-block statistic needs even n, got {n}")));
        }
        Ok(Self { n, domain, loss })
    }

    pub fn loss(&self) -> &LossFunction {
        &self.loss
    }

    pub fn analytic_seminorms(&self) -> SeminormReport {
        seminorms::analytic_seminorms_auc(self.loss.lipschitz(), self.n).expect("n checked at construction")
    }
}

impl Statistic for SmoothedAuc {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn label(&self) -> &str {
        "smoothed_auc"
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        smoothed_auc(&self.loss, x).expect("shape checked at construction")
    }
}

/// `L_F` on a scalar interval.
#[derive(Debug, Clone)]
pub struct LStatistic {
    n: usize,
    domain: Domain,
    weight: WeightFunction,
}

impl LStatistic {
    pub fn new(weight: WeightFunction, n: usize, domain: Domain) -> Result<Self> {
        require_n(n)?;
        require_scalar(&domain)?;
        Ok(Self { n, domain, weight })
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn analytic_seminorms(&self) -> SeminormReport {
        seminorms::analytic_seminorms_lstat(&self.weight, self.domain.diameter(), self.n)
    }
}

impl Statistic for LStatistic {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn label(&self) -> &str {
        "l_statistic"
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        l_statistic(&self.weight, x).expect("mean needs a one-dimensional configuration")
    }
}

/// Empirical error of ridge regression on rows `(z, y)`.
#[derive(Debug, Clone)]
pub struct RidgeError {
    n: usize,
    domain: Domain,
    problem: RidgeProblem,
}

impl RidgeError {
    /// Uses the bounding box `[-1, 1]^(d+1)` of `unit ball x [-1, 1]`.
    pub fn new(problem: RidgeProblem, n: usize) -> Result<Self> {
        let domain = Domain::symmetric(problem.d() + 1, 1.0)?;
        Self::with_domain(problem, n, domain)
    }

    pub fn with_domain(problem: RidgeProblem, n: usize, domain: Domain) -> Result<Self> {
        require_n(n)?;
        if domain.dim() != problem.d() + 1 {
            return Err(Error::Dimension {
                expected: problem.d() + 1,
                actual: domain.dim(),
            });
        }
        Ok(Self { n, domain, problem })
    }

    pub fn problem(&self) -> &RidgeProblem {
        &self.problem
    }
}

impl Statistic for RidgeError {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn label(&self) -> &str {
        "ridge_error"
    }
    fn evaluate(&self, x: &Configuration) -> f64 {
        ridge_error(x, &self.problem).expect("row dimension checked at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::Kernel;

    #[test]
    fn constructors_validate() {
        assert!(MeanStatistic::new(0, Domain::unit(1)).is_err());
        assert!(MeanStatistic::new(3, Domain::unit(2)).is_err());
        assert!(SmoothedAuc::new(LossFunction::ramp(), 5, Domain::unit(1)).is_err());
        assert!(UStatistic::new(Kernel::product(3), 2, Domain::unit(1)).is_err());
        let p = RidgeProblem::new(0.5, 2).unwrap();
        assert!(RidgeError::with_domain(p, 4, Domain::unit(2)).is_err());
        assert_eq!(RidgeError::new(p, 4).unwrap().domain().dim(), 3);
    }

    #[test]
    fn wrappers_agree_with_free_functions() {
        let x = Configuration::from_scalars(&[0.2, 0.9, 0.4, 0.1]).unwrap();
        let u = UStatistic::new(Kernel::product(2), 4, Domain::unit(1)).unwrap();
        assert_eq!(u.evaluate(&x), u_statistic(&Kernel::product(2).into(), &x).unwrap());
        let a = SmoothedAuc::new(LossFunction::ramp(), 4, Domain::unit(1)).unwrap();
        assert_eq!(a.evaluate(&x), smoothed_auc(&LossFunction::ramp(), &x).unwrap());
    }
}
