//! Top-k marginal screening and the truncation interval it induces on each
//! selected score.
//!
//! Selecting `S` (|S| = k) out of `d` scores is the polyhedron
//! `z_ℓ − z_s ≤ 0` for every `(s, ℓ) ∈ S × S̄`. Conditioning the score of a
//! selected feature `m` on that polyhedron restricts it to `[V⁻, V⁺]`.

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{HsicError, Result};
use crate::gaussian_model::{is_positive_definite, ScoreDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningResult {
    /// Selected feature indices (0-based), by decreasing score.
    pub selected: Vec<usize>,
    /// Remaining indices, also by decreasing score.
    pub unselected: Vec<usize>,
    pub z: Array1<f64>,
}

impl ScreeningResult {
    pub fn k(&self) -> usize {
        self.selected.len()
    }

    pub fn k_bar(&self) -> usize {
        self.unselected.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.k() * self.k_bar()
    }

    /// `(selected, unselected)` original feature indices of constraint
    /// `theta` (1-based).
    pub fn constraint_pair(&self, theta: usize) -> Result<(usize, usize)> {
        let (m_pos, l_pos) = constraint_index_maps(theta, self.k(), self.k_bar())?;
        Ok((self.selected[m_pos - 1], self.unselected[l_pos - 1]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationInterval {
    pub lower: f64,
    pub upper: f64,
}

impl TruncationInterval {
    pub fn unbounded() -> Self {
        TruncationInterval { lower: f64::NEG_INFINITY, upper: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

const ROUNDING_SLACK: f64 = 1e-9;

/// Indices of the `k` largest scores. Ties go to the smaller index.
pub fn select_top_k(z: ArrayView1<f64>, k: usize) -> Result<ScreeningResult> {
    let d = z.len();
    if k == 0 || k >= d {
        return Err(HsicError::InvalidSelectionSize { k, d });
    }
    if let Some(bad) = z.iter().position(|v| !v.is_finite()) {
        return Err(HsicError::NonFiniteScore(bad));
    }
    let mut order: Vec<usize> = (0..d).collect();
    // stable sort keeps index order among equal scores
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]));
    let unselected = order.split_off(k);
    Ok(ScreeningResult { selected: order, unselected, z: z.to_owned() })
}

/// Maps constraint `theta ∈ 1..=k·k̄` to 1-based positions
/// `(⌈θ/k̄⌉, ((θ−1) mod k̄) + 1)` in the selected and unselected lists.
pub fn constraint_index_maps(theta: usize, k: usize, k_bar: usize) -> Result<(usize, usize)> {
    let max = k * k_bar;
    if theta == 0 || theta > max {
        return Err(HsicError::ConstraintIndexOutOfRange { theta, max });
    }
    Ok((theta.div_ceil(k_bar), (theta - 1) % k_bar + 1))
}

/// Truncation interval for the score of selected feature `m` given the
/// screening event, using `η = e_m` and `b = 0`.
///
/// For each constraint with pair `(s, ℓ)` the slope is
/// `g = (Σ_ℓm − Σ_sm) / Σ_mm` and the crossing point is
/// `z_m + (z_s − z_ℓ) / g`. Negative slopes bound from below, positive ones
/// from above; zero slopes must already hold at the observed scores.
pub fn truncation_interval(
    m: usize,
    screening: &ScreeningResult,
    dist: &ScoreDistribution,
) -> Result<TruncationInterval> {
    if !screening.selected.contains(&m) {
        return Err(HsicError::NotSelected(m));
    }
    let sigma = &dist.sigma;
    let d = screening.z.len();
    if sigma.nrows() != d || sigma.ncols() != d {
        return Err(HsicError::DimensionMismatch { expected: d, found: sigma.nrows() });
    }
    let var_m = sigma[[m, m]];
    if !(var_m > 0.0) || !is_positive_definite(sigma) {
        return Err(HsicError::NotPositiveDefinite);
    }
    let z = &screening.z;
    let z_m = z[m];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for theta in 1..=screening.num_constraints() {
        let (s, l) = screening.constraint_pair(theta)?;
        let slope = (sigma[[l, m]] - sigma[[s, m]]) / var_m;
        if slope == 0.0 {
            if z[s] < z[l] {
                return Err(HsicError::InfeasibleConstraint { selected: s, unselected: l });
            }
            continue;
        }
        // z_m + (z_s − z_ℓ)/g, ordered so that s = m with g = −1 returns z_ℓ exactly
        let crossing = ((slope * z_m + z[s]) - z[l]) / slope;
        if slope < 0.0 {
            lower = lower.max(crossing);
        } else {
            upper = upper.min(crossing);
        }
    }
    // the observed point satisfies its own selection event, so anything past
    // it beyond rounding means the screening and covariance disagree
    let slack = |bound: f64| ROUNDING_SLACK * (z_m.abs() + bound.abs());
    if lower > z_m + slack(lower) || upper < z_m - slack(upper) {
        return Err(HsicError::EmptyInterval { lower, upper });
    }
    let lower = lower.min(z_m);
    let upper = upper.max(z_m);
    if !(lower < upper) {
        return Err(HsicError::EmptyInterval { lower, upper });
    }
    Ok(TruncationInterval { lower, upper })
}
