use serde::{Deserialize, Serialize};

use super::SeminormReport;
use crate::error::{Error, Result};
use crate::statistics::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelAverage {
    U,
    V,
}

/// Arithmetic mean on an interval of diameter `diameter`.
pub fn analytic_seminorms_mean(diameter: f64, n: usize) -> SeminormReport {
    let n = n as f64;
    SeminormReport::analytic(1.0 / n, 0.0, diameter / n, 0.0)
}

/// U- or V-statistic whose kernels all have `M_Lip <= lipschitz` and
/// `M <= range`. The bound is the same for both averages.
pub fn analytic_seminorms_ustat(
    lipschitz: f64,
    range: f64,
    arity: usize,
    n: usize,
    _kind: KernelAverage,
) -> Result<SeminormReport> {
    if arity > n {
        return Err(Error::Arity { arity, n });
    }
    let (m, nf) = (arity as f64, n as f64);
    Ok(SeminormReport::analytic(
        lipschitz * m / nf,
        lipschitz * m * m / nf,
        range * m / nf,
        range * m * m / nf,
    ))
}

/// Smoothed Wilcoxon statistic with an `L`-Lipschitz loss in `[0, 1]`.
///
/// `J <= 8/n` follows from the four-term cross difference of a `[0, 1]`-valued
/// loss being at most 2.
pub fn analytic_seminorms_auc(lipschitz: f64, n: usize) -> Result<SeminormReport> {
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::Shape(format!("two-block statistic needs even n, got {n}")));
    }
    let nf = n as f64;
    Ok(SeminormReport::analytic(2.0 * lipschitz / nf, 8.0 * lipschitz / nf, 2.0 / nf, 8.0 / nf))
}

/// Lipschitz L-statistic `L_F` on an interval of diameter `diameter`.
///
/// `j_lip` is `diameter * |F|_Lip / n` with the diameter floored at 1: the
/// interaction ratio is scale invariant, so `|F|_Lip / n` bounds it on any
/// interval.
pub fn analytic_seminorms_lstat(weight: &WeightFunction, diameter: f64, n: usize) -> SeminormReport {
    let nf = n as f64;
    let sup = weight.sup_norm();
    if sup == 0.0 {
        return SeminormReport::analytic(0.0, 0.0, 0.0, 0.0);
    }
    let lip = weight.lip_norm();
    let m_lip = sup / nf;
    let m_plain = diameter * sup / nf;
    let j_lip = if lip == 0.0 { 0.0 } else { diameter.max(1.0) * lip / nf };
    let j_plain = if diameter == 0.0 || lip == 0.0 {
        0.0
    } else {
        (diameter * lip / nf).min(2.0 * diameter * sup)
    };
    SeminormReport::analytic(m_lip, j_lip, m_plain, j_plain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seminorms::SeminormMethod;

    #[test]
    fn ustat_examples() {
        let r = analytic_seminorms_ustat(1.0, 1.0, 1, 10, KernelAverage::U).unwrap();
        assert!((r.m_lip - 0.1).abs() < 1e-15 && (r.j_lip - 0.1).abs() < 1e-15);
        let r = analytic_seminorms_ustat(1.0, 1.0, 2, 8, KernelAverage::V).unwrap();
        assert_eq!(r.j_lip, 0.5);
        let r = analytic_seminorms_ustat(0.0, 0.0, 2, 8, KernelAverage::U).unwrap();
        assert_eq!((r.m_lip, r.j_lip, r.m_plain, r.j_plain), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.method, SeminormMethod::AnalyticBound);
        assert!(analytic_seminorms_ustat(1.0, 1.0, 3, 2, KernelAverage::U).is_err());
    }

    #[test]
    fn auc_examples() {
        let r = analytic_seminorms_auc(1.0, 4).unwrap();
        assert_eq!(r.m_lip, 0.5);
        assert_eq!(r.j_lip, 2.0);
        assert_eq!(r.m_plain, 0.5);
        let z = analytic_seminorms_auc(0.0, 4).unwrap();
        assert_eq!((z.m_lip, z.j_lip), (0.0, 0.0));
        assert!(analytic_seminorms_auc(1.0, 5).is_err());
    }

    #[test]
    fn lstat_examples() {
        let r = analytic_seminorms_lstat(&WeightFunction::constant(1.0), 1.0, 10);
        assert!((r.m_lip - 0.1).abs() < 1e-15);
        assert_eq!(r.j_lip, 0.0);
        let r = analytic_seminorms_lstat(&WeightFunction::f_zeta(0.25).unwrap(), 1.0, 8);
        assert!((r.j_lip - (8.0 / 3.0) / 8.0).abs() < 1e-15);
        let r = analytic_seminorms_lstat(&WeightFunction::constant(0.0), 1.0, 8);
        assert_eq!((r.m_lip, r.j_lip, r.m_plain, r.j_plain), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn lstat_large_diameter_follows_formula() {
        let w = WeightFunction::f_zeta(0.125).unwrap();
        let r = analytic_seminorms_lstat(&w, 4.0, 100);
        assert!((r.j_lip - 4.0 * w.lip_norm() / 100.0).abs() < 1e-15);
        assert!((r.m_plain - 4.0 * (4.0 / 3.0) / 100.0).abs() < 1e-15);
    }

    #[test]
    fn mean_matches_plain_values() {
        let r = analytic_seminorms_mean(1.0, 4);
        assert_eq!((r.m_lip, r.j_lip, r.m_plain, r.j_plain), (0.25, 0.0, 0.25, 0.0));
    }
}
