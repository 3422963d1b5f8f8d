//! Partial difference operators and the interaction seminorms
//! `M`, `J`, `M_Lip`, `J_Lip`.
//!
//! Three routes produce a [`SeminormReport`]:
//!
//! * [`empirical_seminorms`]: randomized search over `U^n`. The result is a
//!   lower bound on each seminorm (a search maximum, never the true sup).
//! * `analytic_seminorms_*`: closed-form upper bounds for the shipped
//!   statistic families.
//! * [`derivative_seminorms`]: finite-difference estimates of the gradient
//!   and mixed-Hessian bounds for smooth statistics.
//!
//! Only upper-bound reports may enter a [`BoundCertificate`](crate::bounds::BoundCertificate).

mod analytic;
mod derivative;
mod search;

pub use analytic::{
    analytic_seminorms_auc, analytic_seminorms_lstat, analytic_seminorms_mean, analytic_seminorms_ustat,
    KernelAverage,
};
pub use derivative::{derivative_seminorms, derivative_seminorms_with, DerivativeDetails, DerivativeOptions};
pub use search::{empirical_seminorms, empirical_seminorms_with, SearchOptions};

use serde::{Deserialize, Serialize};

use crate::domain::{Configuration, Statistic};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormMethod {
    AnalyticBound,
    EmpiricalSearch,
    DerivativeBound,
}

impl SeminormMethod {
    /// Whether values produced this way may be used as upper bounds.
    pub fn is_upper_bound(self) -> bool {
        !matches!(self, SeminormMethod::EmpiricalSearch)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SeminormMethod::AnalyticBound => "analytic_bound",
            SeminormMethod::EmpiricalSearch => "empirical_search",
            SeminormMethod::DerivativeBound => "derivative_bound",
        }
    }
}

/// The search point achieving a reported value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: usize,
    pub l: Option<usize>,
    pub x: Configuration,
    pub y: Vec<f64>,
    pub y_prime: Vec<f64>,
    pub z: Option<Vec<f64>>,
    pub z_prime: Option<Vec<f64>>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub m_lip: f64,
    pub j_lip: f64,
    pub m_plain: f64,
    pub j_plain: f64,
    pub method: SeminormMethod,
    pub search_evals: u64,
    /// Witness for `m_lip` (empirical search only).
    pub argmax_witness: Option<Witness>,
    /// Witness for `j_lip` (empirical search only).
    pub interaction_witness: Option<Witness>,
    pub derivative: Option<DerivativeDetails>,
}

impl SeminormReport {
    pub fn analytic(m_lip: f64, j_lip: f64, m_plain: f64, j_plain: f64) -> Self {
        Self {
            m_lip,
            j_lip,
            m_plain,
            j_plain,
            method: SeminormMethod::AnalyticBound,
            search_evals: 0,
            argmax_witness: None,
            interaction_witness: None,
            derivative: None,
        }
    }

    /// Values bounded coordinate-wise by `other` up to a relative tolerance
    /// (for float noise in attained bounds).
    pub fn is_dominated_by(&self, other: &SeminormReport, rel_tol: f64) -> bool {
        let le = |a: f64, b: f64| a <= b + rel_tol * b.abs().max(1e-300);
        le(self.m_lip, other.m_lip)
            && le(self.j_lip, other.j_lip)
            && le(self.m_plain, other.m_plain)
            && le(self.j_plain, other.j_plain)
    }
}

fn check_index(f: &dyn Statistic, x: &Configuration, k: usize) -> Result<()> {
    if x.n() != f.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            actual: x.n(),
        });
    }
    if k >= x.n() {
        return Err(Error::Index { index: k, n: x.n() });
    }
    Ok(())
}

fn check_point(f: &dyn Statistic, p: &[f64]) -> Result<()> {
    let dom = f.domain();
    if p.len() != dom.dim() {
        return Err(Error::Dimension {
            expected: dom.dim(),
            actual: p.len(),
        });
    }
    if let Some(c) = dom.first_violation(p) {
        return Err(Error::OutOfRange(format!("point coordinate {c} = {} outside domain", p[c])));
    }
    Ok(())
}

/// `D^k_{y y'} f(x) = f(x with row k = y) - f(x with row k = y')`.
///
/// Indices are zero-based.
pub fn partial_difference(f: &dyn Statistic, x: &Configuration, k: usize, y: &[f64], y_prime: &[f64]) -> Result<f64> {
    check_index(f, x, k)?;
    check_point(f, y)?;
    check_point(f, y_prime)?;
    let mut scratch = x.clone();
    Ok(raw_partial(f, &mut scratch, k, y, y_prime).0)
}

/// `D^l_{z z'} D^k_{y y'} f(x)`, expanded into four evaluations.
pub fn double_difference(
    f: &dyn Statistic,
    x: &Configuration,
    k: usize,
    l: usize,
    y: &[f64],
    y_prime: &[f64],
    z: &[f64],
    z_prime: &[f64],
) -> Result<f64> {
    check_index(f, x, k)?;
    check_index(f, x, l)?;
    if k == l {
        return Err(Error::SameIndex(k));
    }
    for p in [y, y_prime, z, z_prime] {
        check_point(f, p)?;
    }
    let mut scratch = x.clone();
    Ok(raw_double(f, &mut scratch, k, l, y, y_prime, z, z_prime).0)
}

/// Returns the difference and the magnitude scale of the evaluated terms.
/// Row `k` of `scratch` is left modified.
pub(crate) fn raw_partial(
    f: &dyn Statistic,
    scratch: &mut Configuration,
    k: usize,
    y: &[f64],
    y_prime: &[f64],
) -> (f64, f64) {
    scratch.set_row(k, y);
    let a = f.evaluate(scratch);
    scratch.set_row(k, y_prime);
    let b = f.evaluate(scratch);
    (a - b, a.abs() + b.abs())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn raw_double(
    f: &dyn Statistic,
    scratch: &mut Configuration,
    k: usize,
    l: usize,
    y: &[f64],
    y_prime: &[f64],
    z: &[f64],
    z_prime: &[f64],
) -> (f64, f64) {
    scratch.set_row(l, z);
    let (d1, s1) = raw_partial(f, scratch, k, y, y_prime);
    scratch.set_row(l, z_prime);
    let (d2, s2) = raw_partial(f, scratch, k, y, y_prime);
    (d1 - d2, s1 + s2)
}

/// `|diff|` reduced by its rounding allowance, so it never exceeds the
/// exact magnitude.
pub(crate) fn certified_magnitude(diff: f64, scale: f64) -> f64 {
    (diff.abs() - 64.0 * f64::EPSILON * scale).max(0.0)
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Domain, FnStatistic};
    use crate::statistics::{LStatistic, MeanStatistic, WeightFunction};

    fn xs(v: &[f64]) -> Configuration {
        Configuration::from_scalars(v).unwrap()
    }

    #[test]
    fn partial_difference_of_mean() {
        let f = MeanStatistic::new(4, Domain::unit(1)).unwrap();
        let x = xs(&[0.3, 0.5, 0.2, 0.8]);
        let d = partial_difference(&f, &x, 2, &[0.9], &[0.1]).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
        assert_eq!(partial_difference(&f, &x, 1, &[0.4], &[0.4]).unwrap(), 0.0);
    }

    #[test]
    fn partial_difference_of_constant_weight_lstat() {
        let f = LStatistic::new(WeightFunction::constant(1.0), 5, Domain::unit(1)).unwrap();
        let x = xs(&[0.3, 0.5, 0.2, 0.8, 0.6]);
        let d = partial_difference(&f, &x, 0, &[1.0], &[0.0]).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
    }

    #[test]
    fn index_errors() {
        let f = MeanStatistic::new(3, Domain::unit(1)).unwrap();
        let x = xs(&[0.1, 0.2, 0.3]);
        assert!(matches!(partial_difference(&f, &x, 3, &[0.0], &[1.0]), Err(Error::Index { .. })));
        assert!(matches!(
            double_difference(&f, &x, 1, 1, &[0.0], &[1.0], &[0.0], &[1.0]),
            Err(Error::SameIndex(1))
        ));
        assert!(partial_difference(&f, &x, 0, &[2.0], &[1.0]).is_err());
    }

    #[test]
    fn double_difference_of_mean_vanishes() {
        let f = MeanStatistic::new(3, Domain::unit(1)).unwrap();
        let x = xs(&[0.1, 0.2, 0.3]);
        let dd = double_difference(&f, &x, 0, 2, &[0.9], &[0.4], &[0.7], &[0.0]).unwrap();
        assert!(dd.abs() < 1e-16);
        let same = double_difference(&f, &x, 0, 2, &[0.4], &[0.4], &[0.7], &[0.0]).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn double_difference_of_bilinear_form() {
        // f(x) = x_1 x_2: expanding the four terms gives 1*1 - 0*1 - 1*0 + 0*0
        let f = FnStatistic::new("prod", 2, Domain::unit(1), |x: &Configuration| x.row(0)[0] * x.row(1)[0]);
        let x = xs(&[0.3, 0.6]);
        let dd = double_difference(&f, &x, 0, 1, &[1.0], &[0.0], &[1.0], &[0.0]).unwrap();
        assert_eq!(dd, 1.0);
    }

    #[test]
    fn double_difference_is_symmetric() {
        let f = FnStatistic::new("poly", 3, Domain::unit(1), |x: &Configuration| {
            let v = x.as_slice();
            v[0] * v[1] * v[1] + (v[2] - v[0]).powi(3)
        });
        let x = xs(&[0.3, 0.6, 0.1]);
        let (y, yp, z, zp) = ([0.9], [0.2], [0.4], [0.8]);
        let a = double_difference(&f, &x, 0, 1, &y, &yp, &z, &zp).unwrap();
        let b = double_difference(&f, &x, 1, 0, &z, &zp, &y, &yp).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn rounding_guard() {
        assert_eq!(certified_magnitude(1e-17, 1.0), 0.0);
        assert_eq!(certified_magnitude(-1e-6, 1.0), 1e-6 - 64.0 * f64::EPSILON);
    }
}
