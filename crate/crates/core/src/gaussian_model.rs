//! Normal approximation of the block HSIC score vector.
//!
//! The score of each feature is the mean of `nblocks` i.i.d. within-block
//! estimators, so its covariance is the within-block covariance divided by
//! `nblocks`.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2};

use crate::block_hsic::{column_means, BlockStatistics};
use crate::error::{HsicError, Result};

pub const DEFAULT_SHRINKAGE: f64 = 0.1;

/// A feature whose score variance is at most this fraction of the largest
/// one is treated as having zero variance.
pub const DEGENERATE_RELATIVE_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreDistribution {
    pub mu: Array1<f64>,
    /// Covariance of the score vector (already divided by `nblocks`).
    pub sigma: Array2<f64>,
    pub nblocks: usize,
}

impl ScoreDistribution {
    /// Covariance of a score averaged over `nblocks` blocks instead of
    /// `self.nblocks`. Used when the covariance comes from one split and the
    /// tested scores from another.
    pub fn rescaled_to(&self, nblocks: usize) -> ScoreDistribution {
        let factor = self.nblocks as f64 / nblocks as f64;
        ScoreDistribution { mu: self.mu.clone(), sigma: self.sigma.mapv(|v| v * factor), nblocks }
    }

    pub fn variance(&self, m: usize) -> f64 {
        self.sigma[[m, m]]
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// Sample covariance of the rows of `stats.eta` (denominator `nblocks − 1`),
/// shrunk toward its diagonal and scaled to the block mean:
/// `sigma = ((1 − λ) S + λ diag(S)) / nblocks`.
///
/// With `shrinkage > 0` the result is checked to be positive definite; at
/// zero shrinkage a singular estimate is returned as is.
pub fn estimate_covariance(stats: &BlockStatistics, shrinkage: f64) -> Result<ScoreDistribution> {
    if !(0.0..1.0).contains(&shrinkage) {
        return Err(HsicError::InvalidShrinkage(shrinkage));
    }
    let eta = &stats.eta;
    let (nb, d) = eta.dim();
    if nb < 2 {
        return Err(HsicError::TooFewBlocks(nb));
    }
    let mu = column_means(eta.view());
    let centered = eta - &mu;
    let denom = (nb - 1) as f64;
    let mut sigma = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in i..d {
            let s: f64 =
                centered.column(i).iter().zip(centered.column(j).iter()).map(|(a, b)| a * b).sum::<f64>() / denom;
            let weight = if i == j { 1.0 } else { 1.0 - shrinkage };
            let v = weight * s / nb as f64;
            sigma[[i, j]] = v;
            sigma[[j, i]] = v;
        }
    }

    // rounding leaves ~1e-30 variance on constant features instead of 0
    let largest = (0..d).map(|m| sigma[[m, m]]).fold(0.0, f64::max);
    let floor = DEGENERATE_RELATIVE_VARIANCE * largest;
    let degenerate: Vec<usize> = (0..d).filter(|&m| !(sigma[[m, m]] > floor)).collect();
    if !degenerate.is_empty() {
        return Err(HsicError::DegenerateFeatures(degenerate));
    }
    if shrinkage > 0.0 && !is_positive_definite(&sigma) {
        return Err(HsicError::NotPositiveDefinite);
    }
    Ok(ScoreDistribution { mu, sigma, nblocks: nb })
}

pub fn is_positive_definite(m: &Array2<f64>) -> bool {
    let n = m.nrows();
    if m.iter().any(|v| !v.is_finite()) {
        return false;
    }
    DMatrix::from_fn(n, n, |i, j| m[[i, j]]).cholesky().is_some()
}
