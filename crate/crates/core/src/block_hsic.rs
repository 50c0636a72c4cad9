//! Block HSIC: unbiased HSIC estimates on disjoint blocks of `B` samples,
//! averaged into one score per feature.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{HsicError, Result};
use crate::kernel::{gaussian_gram_scalar, gram_matrix, GramMatrix, KernelSpec};

pub const MIN_BLOCK_SIZE: usize = 4;

/// Disjoint blocks of exactly `block_size` sample indices. The trailing
/// `n mod B` samples are left out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    block_size: usize,
    blocks: Vec<Vec<usize>>,
}

/// How samples are assigned to blocks.
pub enum BlockOrder<'a, R: Rng + ?Sized> {
    Sequential,
    Shuffled(&'a mut R),
}

impl BlockPartition {
    pub fn sequential(n: usize, block_size: usize) -> Result<Self> {
        Self::validate(n, block_size)?;
        let order: Vec<usize> = (0..n).collect();
        Ok(Self::chunk(n, block_size, &order))
    }

    /// Seeded uniform permutation, then sequential chunking.
    pub fn shuffled<R: Rng + ?Sized>(n: usize, block_size: usize, rng: &mut R) -> Result<Self> {
        Self::validate(n, block_size)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Ok(Self::chunk(n, block_size, &order))
    }

    fn validate(n: usize, block_size: usize) -> Result<()> {
        if block_size < MIN_BLOCK_SIZE {
            return Err(HsicError::BlockSizeTooSmall(block_size));
        }
        if n < block_size {
            return Err(HsicError::InsufficientSamples { needed: block_size, have: n });
        }
        Ok(())
    }

    fn chunk(n: usize, block_size: usize, order: &[usize]) -> Self {
        let blocks = order.chunks_exact(block_size).map(|c| c.to_vec()).collect();
        BlockPartition { n, block_size, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn used_samples(&self) -> usize {
        self.blocks.len() * self.block_size
    }
}

/// Builds a partition from `order`; the generic entry point used when the
/// caller already holds an RNG or wants sequential blocks.
pub fn partition_blocks<R: Rng + ?Sized>(
    n: usize,
    block_size: usize,
    order: BlockOrder<'_, R>,
) -> Result<BlockPartition> {
    match order {
        BlockOrder::Sequential => BlockPartition::sequential(n, block_size),
        BlockOrder::Shuffled(rng) => BlockPartition::shuffled(n, block_size, rng),
    }
}

/// Within-block estimators (rows = blocks, columns = features) and the
/// partition that produced them.
#[derive(Debug, Clone)]
pub struct BlockStatistics {
    pub eta: Array2<f64>,
    pub partition: BlockPartition,
}

impl BlockStatistics {
    pub fn num_blocks(&self) -> usize {
        self.eta.nrows()
    }

    pub fn num_features(&self) -> usize {
        self.eta.ncols()
    }

    /// Per-feature block average; this is the HSIC score vector.
    pub fn scores(&self) -> Array1<f64> {
        column_means(self.eta.view())
    }
}

pub(crate) fn column_means(m: ArrayView2<f64>) -> Array1<f64> {
    let rows = m.nrows() as f64;
    m.axis_iter(Axis(1)).map(|col| col.iter().fold(0.0, |acc, &v| acc + v) / rows).collect()
}

/// Unbiased HSIC estimate on one block:
///
/// ```text
/// 1/(B(B−3)) [ tr(K̄L̄) + (1ᵀK̄1)(1ᵀL̄1)/((B−1)(B−2)) − 2/(B−2) · 1ᵀK̄L̄1 ]
/// ```
///
/// where `K̄`, `L̄` are the Gram matrices with zeroed diagonals.
pub fn within_block_hsic(k: &GramMatrix, l: &GramMatrix) -> Result<f64> {
    let b = k.block_size();
    if l.block_size() != b {
        return Err(HsicError::DimensionMismatch { expected: b, found: l.block_size() });
    }
    if b < MIN_BLOCK_SIZE {
        return Err(HsicError::BlockSizeTooSmall(b));
    }
    let l_stats = OutputBlock::new(l.values().view());
    Ok(l_stats.hsic_with(k.values().view()))
}

/// Cached output-side quantities for one block: `L̄`, its row sums and
/// `1ᵀL̄1`. Shared across all features.
struct OutputBlock {
    l_bar: Array2<f64>,
    row_sums: Array1<f64>,
    total: f64,
}

impl OutputBlock {
    fn new(l: ArrayView2<f64>) -> Self {
        let mut l_bar = l.to_owned();
        l_bar.diag_mut().fill(0.0);
        let row_sums = l_bar.sum_axis(Axis(1));
        let total = row_sums.sum();
        OutputBlock { l_bar, row_sums, total }
    }

    fn hsic_with(&self, k: ArrayView2<f64>) -> f64 {
        let b = k.nrows();
        let bf = b as f64;
        let mut trace = 0.0;
        let mut k_total = 0.0;
        let mut cross = 0.0;
        for i in 0..b {
            let mut k_row = 0.0;
            for j in 0..b {
                if i == j {
                    continue;
                }
                let kij = k[[i, j]];
                trace += kij * self.l_bar[[j, i]];
                k_row += kij;
            }
            k_total += k_row;
            cross += k_row * self.row_sums[i];
        }
        (trace + k_total * self.total / ((bf - 1.0) * (bf - 2.0)) - 2.0 / (bf - 2.0) * cross) / (bf * (bf - 3.0))
    }
}

/// Block HSIC score for every feature column of `x` against `y`.
///
/// Each feature uses only its own column (a scalar input kernel); the output
/// Gram uses all columns of `y`. Output Grams are built once per block and
/// shared by all features, which are processed in parallel.
pub fn hsic_vector(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    spec_x: &KernelSpec,
    spec_y: &KernelSpec,
    partition: &BlockPartition,
) -> Result<(Array1<f64>, BlockStatistics)> {
    spec_x.validate()?;
    spec_y.validate()?;
    let n = x.nrows();
    if y.nrows() != n {
        return Err(HsicError::ResponseLength { expected: n, found: y.nrows() });
    }
    if partition.n() != n {
        return Err(HsicError::DimensionMismatch { expected: partition.n(), found: n });
    }
    let b = partition.block_size();

    let outputs: Vec<OutputBlock> = partition
        .blocks()
        .iter()
        .map(|idx| {
            let pts = y.select(Axis(0), idx);
            gram_matrix(pts.view(), spec_y).map(|g| OutputBlock::new(g.values().view()))
        })
        .collect::<Result<_>>()?;

    let columns: Vec<Vec<f64>> = (0..x.ncols())
        .into_par_iter()
        .map(|m| feature_column(x.column(m), spec_x, partition, &outputs, b))
        .collect::<Result<_>>()?;

    let mut eta = Array2::zeros((partition.num_blocks(), x.ncols()));
    for (m, col) in columns.into_iter().enumerate() {
        eta.column_mut(m).assign(&Array1::from(col));
    }
    let stats = BlockStatistics { eta, partition: partition.clone() };
    Ok((stats.scores(), stats))
}

fn feature_column(
    column: ArrayView1<f64>,
    spec_x: &KernelSpec,
    partition: &BlockPartition,
    outputs: &[OutputBlock],
    b: usize,
) -> Result<Vec<f64>> {
    let mut gram = Array2::zeros((b, b));
    let mut buf = vec![0.0; b];
    partition
        .blocks()
        .iter()
        .zip(outputs)
        .map(|(idx, out)| {
            for (slot, &i) in buf.iter_mut().zip(idx) {
                *slot = column[i];
            }
            match *spec_x {
                KernelSpec::Gaussian { bandwidth } => {
                    gaussian_gram_scalar(&buf, bandwidth, &mut gram);
                    Ok(out.hsic_with(gram.view()))
                }
                ref other => {
                    let pts = Array2::from_shape_vec((b, 1), buf.clone()).expect("block buffer has length B");
                    let g = gram_matrix(pts.view(), other)?;
                    Ok(out.hsic_with(g.values().view()))
                }
            }
        })
        .collect()
}
