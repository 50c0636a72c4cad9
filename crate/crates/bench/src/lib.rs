//! Shared inputs for the benchmarks.

use hsicinf::{gram_matrix, GramMatrix, KernelSpec};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((rows, cols), |_| StandardNormal.sample(&mut rng))
}

/// Gaussian Gram matrices of two independent size-`b` samples.
pub fn gram_pair(b: usize, seed: u64) -> (GramMatrix, GramMatrix) {
    let x = normal_matrix(b, 1, seed);
    let y = normal_matrix(b, 1, seed.wrapping_add(1));
    let spec = KernelSpec::Gaussian { bandwidth: 1.0 };
    (gram_matrix(x.view(), &spec).unwrap(), gram_matrix(y.view(), &spec).unwrap())
}
