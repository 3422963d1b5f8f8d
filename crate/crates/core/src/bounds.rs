//! Assembly of uniform deviation certificates.
//!
//! For a statistic `f` with interaction seminorms `M_Lip`, `J_Lip`, `M` and
//! a function class `H`, with probability at least `1 - delta`
//!
//! ```text
//! sup_h  E f(h(X')) - f(h(X))  <=  sqrt(2 pi) (2 M_Lip + J_Lip) E[G(H(X))] + M sqrt(n ln(1/delta))
//! ```
//!
//! and the first term alone bounds the expectation of the left side. The same
//! holds with the sign of the deviation flipped, since the seminorms of `-f`
//! equal those of `f`.
//!
//! Only upper-bound seminorm reports are accepted. The Gaussian average is a
//! Monte-Carlo estimate, so certificates use `mean + z * std_error` (see
//! [`CertificateOptions`]).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complexity::ComplexityEstimate;
use crate::error::{Error, Result};
use crate::seminorms::SeminormReport;
use crate::statistics::LossFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `E f(h(X')) - f(h(X))`
    PopMinusEmp,
    /// `f(h(X)) - E f(h(X'))`
    EmpMinusPop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateOptions {
    /// Multiple of the Monte-Carlo standard error added to the Gaussian
    /// average before it enters a certificate.
    pub se_inflation: f64,
    pub direction: Direction,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            se_inflation: 3.0,
            direction: Direction::PopMinusEmp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub symmetrization_term: f64,
    pub tail_term: f64,
    /// `None` for the in-expectation certificate.
    pub delta: Option<f64>,
    pub total: f64,
    pub n: usize,
    /// Gaussian average used, after inflation.
    pub complexity_used: f64,
    pub se_inflation: f64,
    pub direction: Direction,
    pub seminorms: SeminormReport,
    pub complexity: ComplexityEstimate,
}

fn require_upper(report: &SeminormReport) -> Result<()> {
    if !report.method.is_upper_bound() {
        return Err(Error::UncertifiedSeminorms(report.method));
    }
    Ok(())
}

fn require_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Delta(delta));
    }
    Ok(())
}

fn symmetrization_value(report: &SeminormReport, g: f64) -> f64 {
    if g == 0.0 {
        return 0.0;
    }
    (2.0 * PI).sqrt() * (2.0 * report.m_lip + report.j_lip) * g
}

/// `sqrt(2 pi) (2 m_lip + j_lip) g.mean`, without inflation.
pub fn symmetrization_bound(report: &SeminormReport, g: &ComplexityEstimate) -> Result<f64> {
    require_upper(report)?;
    Ok(symmetrization_value(report, g.mean))
}

/// Bound on the expected uniform deviation.
pub fn expectation_certificate(
    report: &SeminormReport,
    g: &ComplexityEstimate,
    n: usize,
    opts: &CertificateOptions,
) -> Result<BoundCertificate> {
    require_upper(report)?;
    let used = g.upper(opts.se_inflation).max(0.0);
    let sym = symmetrization_value(report, used);
    Ok(BoundCertificate {
        symmetrization_term: sym,
        tail_term: 0.0,
        delta: None,
        total: sym,
        n,
        complexity_used: used,
        se_inflation: opts.se_inflation,
        direction: opts.direction,
        seminorms: report.clone(),
        complexity: *g,
    })
}

/// High-probability uniform bound with [`CertificateOptions::default`].
pub fn uniform_bound(
    report: &SeminormReport,
    g: &ComplexityEstimate,
    n: usize,
    delta: f64,
) -> Result<BoundCertificate> {
    uniform_bound_with(report, g, n, delta, &CertificateOptions::default())
}

/// Adds the tail `m_plain sqrt(n ln(1/delta))` to the expectation bound.
pub fn uniform_bound_with(
    report: &SeminormReport,
    g: &ComplexityEstimate,
    n: usize,
    delta: f64,
    opts: &CertificateOptions,
) -> Result<BoundCertificate> {
    require_delta(delta)?;
    let mut cert = expectation_certificate(report, g, n, opts)?;
    let tail = if report.m_plain == 0.0 {
        0.0
    } else {
        report.m_plain * (n as f64 * (1.0 / delta).ln()).sqrt()
    };
    cert.tail_term = tail;
    cert.delta = Some(delta);
    cert.total = cert.symmetrization_term + tail;
    Ok(cert)
}

/// High-probability lower bound on the population AUC of a ranker chosen
/// by maximizing the smoothed statistic, with [`CertificateOptions::default`].
pub fn auc_certificate(
    auc_emp: f64,
    loss: &LossFunction,
    n: usize,
    g: &ComplexityEstimate,
    delta: f64,
) -> Result<f64> {
    auc_certificate_with(auc_emp, loss, n, g, delta, &CertificateOptions::default())
}

/// `auc_emp - 12 sqrt(2 pi) L g / n - 2 sqrt(ln(1/delta) / n)`
pub fn auc_certificate_with(
    auc_emp: f64,
    loss: &LossFunction,
    n: usize,
    g: &ComplexityEstimate,
    delta: f64,
    opts: &CertificateOptions,
) -> Result<f64> {
    if !loss.below_indicator() {
        return Err(Error::Inapplicable(format!(
            "loss `{}` is not dominated by the strict indicator",
            loss.label()
        )));
    }
    require_delta(delta)?;
    let nf = n as f64;
    let used = g.upper(opts.se_inflation).max(0.0);
    let complexity = if used == 0.0 {
        0.0
    } else {
        12.0 * (2.0 * PI).sqrt() * loss.lipschitz() * used / nf
    };
    let tail = 2.0 * ((1.0 / delta).ln() / nf).sqrt();
    Ok(auc_emp - complexity - tail)
}

/// Bounded-difference tail `exp(-2 t^2 / sum c_k^2)`.
pub fn mcdiarmid_tail(coordinate_ranges: &[f64], t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::OutOfRange(format!("deviation t = {t} must be nonnegative")));
    }
    if let Some(c) = coordinate_ranges.iter().find(|c| !(**c >= 0.0)) {
        return Err(Error::OutOfRange(format!("coordinate range {c} must be nonnegative")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let denom: f64 = coordinate_ranges.iter().map(|c| c * c).sum();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((-2.0 * t * t / denom).exp())
}
