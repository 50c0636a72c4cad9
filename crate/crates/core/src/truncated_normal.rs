//! Truncated normal CDF and selective p-values.
//!
//! Probabilities of an interval `[a, b]` (standardized) are computed as logs
//! of tail differences, `ln(Q(a) − Q(b))` with `Q` the upper tail, so that
//! intervals deep in either tail keep full relative precision. Beyond
//! [`TAIL_CUTOFF`] standard deviations the Mills ratio `Q(x)/φ(x)` comes from
//! its continued fraction instead of `erfc`.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{HsicError, Result};
use crate::selection_event::TruncationInterval;

pub const TAIL_CUTOFF: f64 = 6.0;

const CONTINUED_FRACTION_TERMS: usize = 120;

/// Normal `N(mean, variance)` restricted to `[lower, upper]`; bounds may be
/// infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormalParams {
    pub mean: f64,
    pub variance: f64,
    pub lower: f64,
    pub upper: f64,
}

impl TruncatedNormalParams {
    pub fn new(mean: f64, variance: f64, lower: f64, upper: f64) -> Result<Self> {
        let p = TruncatedNormalParams { mean, variance, lower, upper };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.variance.is_finite() && self.variance > 0.0) {
            return Err(HsicError::InvalidVariance(self.variance));
        }
        if self.lower.is_nan() || self.upper.is_nan() || !(self.lower < self.upper) {
            return Err(HsicError::InvalidBounds { lower: self.lower, upper: self.upper });
        }
        Ok(())
    }

    fn standardize(&self, x: f64) -> f64 {
        (x - self.mean) / self.variance.sqrt()
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if !(x >= self.lower && x <= self.upper) {
            return Err(HsicError::OutsideSupport { x, lower: self.lower, upper: self.upper });
        }
        Ok(())
    }

    fn ln_total_mass(&self) -> Result<f64> {
        let a = self.standardize(self.lower);
        let b = self.standardize(self.upper);
        let total = ln_interval_mass(a, b);
        if total == f64::NEG_INFINITY || total.is_nan() {
            return Err(HsicError::PrecisionLoss { lower: self.lower, upper: self.upper });
        }
        Ok(total)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal upper tail `Q(x) = 1 − Φ(x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

fn ln_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * PI).ln()
}

/// `ln(Q(x)/φ(x))` for `x ≥ 0`.
fn ln_mills_ratio(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    if x < TAIL_CUTOFF {
        return (normal_sf(x) / ln_normal_pdf(x).exp()).ln();
    }
    // Q(x)/φ(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated backward.
    let mut t = x;
    for j in (1..=CONTINUED_FRACTION_TERMS).rev() {
        t = x + j as f64 / t;
    }
    -t.ln()
}

/// `ln Q(x)`, valid for all `x` including the far upper tail.
pub fn ln_normal_sf(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::NEG_INFINITY
    } else if x >= TAIL_CUTOFF {
        ln_normal_pdf(x) + ln_mills_ratio(x)
    } else if x >= 0.0 {
        normal_sf(x).ln()
    } else {
        (-normal_sf(-x)).ln_1p()
    }
}

/// `ln(Q(a) − Q(b))` for `0 ≤ a ≤ b ≤ ∞`.
fn ln_upper_tail_difference(a: f64, b: f64) -> f64 {
    debug_assert!(0.0 <= a && a <= b);
    if a == b {
        return f64::NEG_INFINITY;
    }
    let ln_qa = ln_normal_sf(a);
    if b == f64::INFINITY {
        return ln_qa;
    }
    // ln Q(b) − ln Q(a), with the Gaussian factor differenced exactly
    let delta = -0.5 * (b - a) * (b + a) + ln_mills_ratio(b) - ln_mills_ratio(a);
    ln_qa + (-delta.exp_m1()).ln()
}

/// `ln P(a ≤ Z ≤ b)` for a standard normal `Z` and `a ≤ b`.
pub fn ln_interval_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        ln_upper_tail_difference(a, b)
    } else if b <= 0.0 {
        ln_upper_tail_difference(-b, -a)
    } else {
        // both tails are below one half, so the complement has no cancellation
        (-(normal_sf(b) + normal_sf(-a))).ln_1p()
    }
}

fn ratio(ln_num: f64, ln_den: f64) -> f64 {
    (ln_num - ln_den).exp().clamp(0.0, 1.0)
}

/// CDF of the truncated normal at `x ∈ [lower, upper]`.
pub fn trunc_norm_cdf(x: f64, params: &TruncatedNormalParams) -> Result<f64> {
    params.validate()?;
    params.check_support(x)?;
    let total = params.ln_total_mass()?;
    let a = params.standardize(params.lower);
    let xi = params.standardize(x);
    Ok(ratio(ln_interval_mass(a, xi), total))
}

/// Survival function `1 − F(x)`, computed directly so tiny upper-tail
/// probabilities are not lost to cancellation.
pub fn trunc_norm_sf(x: f64, params: &TruncatedNormalParams) -> Result<f64> {
    params.validate()?;
    params.check_support(x)?;
    let total = params.ln_total_mass()?;
    let b = params.standardize(params.upper);
    let xi = params.standardize(x);
    Ok(ratio(ln_interval_mass(xi, b), total))
}

/// One-sided selective p-value `1 − F^{[V⁻,V⁺]}_{0,variance}(z)` for the null
/// of zero HSIC against the (only possible) positive alternative.
pub fn selective_p_value(z: f64, variance: f64, interval: &TruncationInterval) -> Result<f64> {
    let params = TruncatedNormalParams::new(0.0, variance, interval.lower, interval.upper)?;
    trunc_norm_sf(z, &params)
}

/// Unadjusted one-sided normal p-value; the same as a selective p-value with
/// an unbounded interval.
pub fn naive_p_value(z: f64, variance: f64) -> Result<f64> {
    selective_p_value(z, variance, &TruncationInterval::unbounded())
}
