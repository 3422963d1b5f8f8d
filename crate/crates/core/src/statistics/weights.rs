use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const PROBE_GRID: usize = 1000;

/// Pairwise loss `ell: R -> [0, 1]` for the smoothed Wilcoxon statistic.
#[derive(Clone)]
pub struct LossFunction {
    label: String,
    lipschitz: f64,
    below_indicator: bool,
    eval: ScalarFn,
}

impl fmt::Debug for LossFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LossFunction")
            .field("label", &self.label)
            .field("lipschitz", &self.lipschitz)
            .field("below_indicator", &self.below_indicator)
            .finish()
    }
}

impl LossFunction {
    /// Custom loss. Values are clamped into `[0, 1]` on evaluation.
    pub fn new<F>(label: impl Into<String>, lipschitz: f64, below_indicator: bool, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lipschitz >= 0.0) {
            return Err(Error::OutOfRange(format!("Lipschitz constant {lipschitz} must be nonnegative")));
        }
        Ok(Self {
            label: label.into(),
            lipschitz,
            below_indicator,
            eval: Arc::new(f),
        })
    }

    /// `clamp(t, 0, 1)`: 1-Lipschitz and dominated by `1_{(0, inf)}`.
    pub fn ramp() -> Self {
        Self::ramp_with_margin(1.0).expect("unit margin")
    }

    /// `clamp(t / margin, 0, 1)` with Lipschitz constant `1 / margin`.
    pub fn ramp_with_margin(margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(Error::OutOfRange(format!("ramp margin {margin} must be positive")));
        }
        Self::new(format!("ramp({margin})"), 1.0 / margin, true, move |t| (t / margin).clamp(0.0, 1.0))
    }

    /// The indicator `1_{(0, inf)}` itself (not Lipschitz).
    pub fn indicator() -> Self {
        Self::new("indicator", f64::INFINITY, true, |t| if t > 0.0 { 1.0 } else { 0.0 })
            .expect("valid")
    }

    /// Logistic `1 / (1 + exp(-t / scale))`, Lipschitz `1 / (4 scale)`, not below the indicator.
    pub fn sigmoid(scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::OutOfRange(format!("sigmoid scale {scale} must be positive")));
        }
        Self::new(format!("sigmoid({scale})"), 0.25 / scale, false, move |t| 1.0 / (1.0 + (-t / scale).exp()))
    }

    pub fn zero() -> Self {
        Self::new("zero", 0.0, true, |_| 0.0).expect("valid")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn below_indicator(&self) -> bool {
        self.below_indicator
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        (self.eval)(t).clamp(0.0, 1.0)
    }

    /// Largest difference quotient over a probe grid on `[-radius, radius]`.
    pub fn probe_lipschitz(&self, radius: f64) -> f64 {
        grid_lipschitz(|t| self.evaluate(t), -radius, radius)
    }
}

/// Rank weight `F: [0, 1] -> R` with its sup norm and Lipschitz constant.
#[derive(Clone)]
pub struct WeightFunction {
    label: String,
    sup_norm: f64,
    lip_norm: f64,
    eval: ScalarFn,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("label", &self.label)
            .field("sup_norm", &self.sup_norm)
            .field("lip_norm", &self.lip_norm)
            .finish()
    }
}

impl WeightFunction {
    /// Custom weight; the declared norms are checked on a probe grid.
    pub fn new<F>(label: impl Into<String>, sup_norm: f64, lip_norm: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let w = Self {
            label: label.into(),
            sup_norm,
            lip_norm,
            eval: Arc::new(f),
        };
        let observed_sup = (0..=PROBE_GRID)
            .map(|i| w.evaluate(i as f64 / PROBE_GRID as f64).abs())
            .fold(0.0, f64::max);
        if observed_sup > sup_norm * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::OutOfRange(format!(
                "weight `{}` reaches |F| = {observed_sup} above declared sup norm {sup_norm}",
                w.label
            )));
        }
        let observed_lip = grid_lipschitz(|t| w.evaluate(t), 0.0, 1.0);
        if observed_lip > lip_norm * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::OutOfRange(format!(
                "weight `{}` has difference quotient {observed_lip} above declared Lipschitz norm {lip_norm}",
                w.label
            )));
        }
        Ok(w)
    }

    /// `F = c`; the plain mean for `c = 1`.
    pub fn constant(c: f64) -> Self {
        Self {
            label: format!("constant({c})"),
            sup_norm: c.abs(),
            lip_norm: 0.0,
            eval: Arc::new(move |_| c),
        }
    }

    /// The smoothed 75% trimming weight `F_zeta`.
    pub fn f_zeta(zeta: f64) -> Result<Self> {
        check_zeta(zeta)?;
        let lip_norm = if zeta == 0.0 { f64::INFINITY } else { 2.0 / (3.0 * zeta) };
        Ok(Self {
            label: format!("f_zeta({zeta})"),
            sup_norm: 4.0 / 3.0,
            lip_norm,
            eval: Arc::new(move |t| f_zeta_unchecked(t, zeta)),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn lip_norm(&self) -> f64 {
        self.lip_norm
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// True if `F` is nonincreasing on a probe grid, which makes the
    /// rank-weighted objective a minimum over pairings of weights and values.
    pub fn is_nonincreasing(&self) -> bool {
        (0..PROBE_GRID).all(|i| {
            let a = self.evaluate(i as f64 / PROBE_GRID as f64);
            let b = self.evaluate((i + 1) as f64 / PROBE_GRID as f64);
            b <= a + 1e-15
        })
    }
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(0.0..=0.25).contains(&zeta) {
        return Err(Error::OutOfRange(format!("zeta = {zeta} not in [0, 1/4]")));
    }
    Ok(())
}

/// `F_zeta(t)`: `4/3` on `[0, 3/4 - zeta]`, a linear ramp down to 0 on
/// `(3/4 - zeta, 3/4 + zeta]`, and 0 above. At `zeta = 0` the drop happens
/// immediately after `t = 3/4`.
pub fn f_zeta(t: f64, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("t = {t} not in [0, 1]")));
    }
    Ok(f_zeta_unchecked(t, zeta))
}

fn f_zeta_unchecked(t: f64, zeta: f64) -> f64 {
    if t <= 0.75 - zeta {
        4.0 / 3.0
    } else if t <= 0.75 + zeta {
        -(2.0 / (3.0 * zeta)) * (t - 0.75 - zeta)
    } else {
        0.0
    }
}

fn grid_lipschitz(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let step = (hi - lo) / PROBE_GRID as f64;
    let mut prev = f(lo);
    let mut worst = 0.0_f64;
    for i in 1..=PROBE_GRID {
        let cur = f(lo + step * i as f64);
        worst = worst.max((cur - prev).abs() / step);
        prev = cur;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_zeta_branches() {
        assert_eq!(f_zeta(0.5, 0.25).unwrap(), 4.0 / 3.0);
        // -(8/3)(0.75 - 1.0)
        assert!((f_zeta(0.75, 0.25).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f_zeta(1.0, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn f_zeta_zero_is_a_step_after_three_quarters() {
        assert_eq!(f_zeta(0.75, 0.0).unwrap(), 4.0 / 3.0);
        assert_eq!(f_zeta(0.7500001, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn f_zeta_rejects_bad_arguments() {
        assert!(f_zeta(1.1, 0.1).is_err());
        assert!(f_zeta(-0.1, 0.1).is_err());
        assert!(f_zeta(0.5, 0.3).is_err());
        assert!(WeightFunction::f_zeta(-0.01).is_err());
    }

    #[test]
    fn f_zeta_is_continuous_for_positive_zeta() {
        for &zeta in &[0.01, 0.125, 0.25] {
            let below = f_zeta(0.75 - zeta, zeta).unwrap();
            let above = f_zeta((0.75 + zeta).min(1.0), zeta).unwrap();
            assert!((below - 4.0 / 3.0).abs() < 1e-12);
            assert!(above.abs() < 1e-12);
        }
    }

    #[test]
    fn f_zeta_norms() {
        let w = WeightFunction::f_zeta(0.25).unwrap();
        assert_eq!(w.sup_norm(), 4.0 / 3.0);
        assert!((w.lip_norm() - 8.0 / 3.0).abs() < 1e-15);
        assert!(WeightFunction::f_zeta(0.0).unwrap().lip_norm().is_infinite());
        assert!(w.is_nonincreasing());
    }

    #[test]
    fn custom_weight_norms_are_validated() {
        assert!(WeightFunction::new("lin", 1.0, 1.0, |t| t).is_ok());
        assert!(WeightFunction::new("lin", 0.5, 1.0, |t| t).is_err());
        assert!(WeightFunction::new("lin", 1.0, 0.5, |t| t).is_err());
    }

    #[test]
    fn ramp_properties() {
        let l = LossFunction::ramp();
        assert_eq!(l.evaluate(-0.3), 0.0);
        assert_eq!(l.evaluate(0.4), 0.4);
        assert_eq!(l.evaluate(3.0), 1.0);
        assert!(l.below_indicator());
        assert!(l.probe_lipschitz(3.0) <= l.lipschitz() + 1e-12);
        let ind = LossFunction::indicator();
        for i in -50..50 {
            let t = i as f64 / 10.0;
            assert!(l.evaluate(t) <= ind.evaluate(t));
        }
    }

    #[test]
    fn sigmoid_is_not_below_indicator() {
        let s = LossFunction::sigmoid(0.5).unwrap();
        assert!(!s.below_indicator());
        assert!(s.probe_lipschitz(5.0) <= s.lipschitz() + 1e-9);
    }
}
