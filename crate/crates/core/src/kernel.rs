//! Kernel specifications and Gram matrices over small blocks of samples.
//!
//! Points are passed as the rows of a matrix. The Gaussian kernel is
//! `exp(-‖a − b‖² / (2τ²))` with no internal rescaling; callers standardize
//! inputs first if they want unit-scale features.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{HsicError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelSpec {
    Gaussian {
        bandwidth: f64,
    },
    Linear,
    /// Class-indicator kernel on labels `1..=classes`.
    Delta {
        classes: usize,
    },
}

impl KernelSpec {
    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        let spec = KernelSpec::Gaussian { bandwidth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn delta(classes: usize) -> Result<Self> {
        let spec = KernelSpec::Delta { classes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Gaussian { bandwidth } => {
                if !(bandwidth.is_finite() && bandwidth > 0.0) {
                    return Err(HsicError::InvalidBandwidth(bandwidth));
                }
            }
            KernelSpec::Delta { classes } => {
                if classes < 2 {
                    return Err(HsicError::TooFewClasses(classes));
                }
            }
            KernelSpec::Linear => {}
        }
        Ok(())
    }
}

/// Symmetric `B × B` kernel matrix for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    values: Array2<f64>,
}

impl GramMatrix {
    /// Wraps a matrix, mirroring the upper triangle so the result is exactly
    /// symmetric.
    pub fn from_upper(mut values: Array2<f64>) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c {
            return Err(HsicError::DimensionMismatch { expected: r, found: c });
        }
        for i in 0..r {
            for j in 0..i {
                values[[i, j]] = values[[j, i]];
            }
        }
        Ok(GramMatrix { values })
    }

    pub fn block_size(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }
}

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn label_of(value: f64, classes: usize) -> Result<usize> {
    let rounded = value.round();
    if !value.is_finite() || rounded != value || rounded < 1.0 || rounded > classes as f64 {
        let label = if value.is_finite() { value as i64 } else { i64::MIN };
        return Err(HsicError::LabelOutOfRange { label, classes });
    }
    Ok(rounded as usize)
}

/// Reads one label per row, either as a single integer column or as a
/// one-hot row of width `classes`.
fn labels_from_points(points: ArrayView2<f64>, classes: usize) -> Result<Vec<usize>> {
    match points.ncols() {
        1 => points.column(0).iter().map(|&v| label_of(v, classes)).collect(),
        w if w == classes => points
            .rows()
            .into_iter()
            .map(|row| {
                let mut hot = None;
                for (pos, &v) in row.iter().enumerate() {
                    if v == 1.0 && hot.is_none() {
                        hot = Some(pos + 1);
                    } else if v != 0.0 {
                        return Err(HsicError::LabelOutOfRange { label: -1, classes });
                    }
                }
                hot.ok_or(HsicError::LabelOutOfRange { label: 0, classes })
            })
            .collect(),
        w => Err(HsicError::DimensionMismatch { expected: classes, found: w }),
    }
}

/// Kernel matrix `[K]_ij = κ(p_i, p_j)` over the rows of `points`.
pub fn gram_matrix(points: ArrayView2<f64>, spec: &KernelSpec) -> Result<GramMatrix> {
    spec.validate()?;
    let n = points.nrows();
    if n == 0 {
        return Err(HsicError::TooFewPoints { needed: 1, got: 0 });
    }
    let mut k = Array2::<f64>::zeros((n, n));
    match *spec {
        KernelSpec::Gaussian { bandwidth } => {
            let scale = 1.0 / (2.0 * bandwidth * bandwidth);
            for i in 0..n {
                k[[i, i]] = 1.0;
                for j in (i + 1)..n {
                    let d2 = squared_distance(points.row(i), points.row(j));
                    k[[i, j]] = (-d2 * scale).exp();
                }
            }
        }
        KernelSpec::Linear => {
            for i in 0..n {
                for j in i..n {
                    k[[i, j]] = points.row(i).dot(&points.row(j));
                }
            }
        }
        KernelSpec::Delta { classes } => {
            let labels = labels_from_points(points, classes)?;
            for i in 0..n {
                for j in i..n {
                    k[[i, j]] = if labels[i] == labels[j] { 1.0 } else { 0.0 };
                }
            }
        }
    }
    GramMatrix::from_upper(k)
}

/// Gaussian Gram matrix for scalar samples; avoids the row views used by
/// [`gram_matrix`] on the per-feature hot path.
pub(crate) fn gaussian_gram_scalar(values: &[f64], bandwidth: f64, out: &mut Array2<f64>) {
    let n = values.len();
    let scale = 1.0 / (2.0 * bandwidth * bandwidth);
    for i in 0..n {
        out[[i, i]] = 1.0;
        for j in (i + 1)..n {
            let d = values[i] - values[j];
            let v = (-d * d * scale).exp();
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
}

/// Median of the pairwise Euclidean distances over unordered pairs `i < j`.
pub fn median_heuristic(points: ArrayView2<f64>) -> Result<f64> {
    let n = points.nrows();
    if n < 2 {
        return Err(HsicError::TooFewPoints { needed: 2, got: n });
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            dists.push(squared_distance(points.row(i), points.row(j)).sqrt());
        }
    }
    let len = dists.len();
    let mid = len / 2;
    let (_, &mut upper, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    let median = if len % 2 == 1 {
        upper
    } else {
        let lower = dists[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    };
    if median > 0.0 {
        Ok(median)
    } else if dists.iter().all(|&d| d == 0.0) {
        Err(HsicError::DegenerateBandwidth)
    } else {
        // More than half the pairs coincide; fall back to the median of the
        // nonzero distances so the bandwidth stays positive.
        let mut nonzero: Vec<f64> = dists.into_iter().filter(|&d| d > 0.0).collect();
        nonzero.sort_by(f64::total_cmp);
        let m = nonzero.len();
        Ok(if m % 2 == 1 { nonzero[m / 2] } else { 0.5 * (nonzero[m / 2 - 1] + nonzero[m / 2]) })
    }
}

/// One-hot rows for labels in `1..=classes`.
pub fn one_hot_encode(labels: &[usize], classes: usize) -> Result<Array2<f64>> {
    if classes < 2 {
        return Err(HsicError::TooFewClasses(classes));
    }
    let mut out = Array2::zeros((labels.len(), classes));
    for (row, &label) in labels.iter().enumerate() {
        if label == 0 || label > classes {
            return Err(HsicError::LabelOutOfRange { label: label as i64, classes });
        }
        out[[row, label - 1]] = 1.0;
    }
    Ok(out)
}
