//! Seeded generators for the simulation scenarios.
//!
//! Regression inputs are `N(0, Σ̄)` on 20 features where `Σ̄` is the identity
//! except for an equicorrelated leading block (unit variance, covariance
//! 0.05). Noise `E` is standard normal, scaled by 0.1 in every response.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Response};
use crate::error::{HsicError, Result};
use crate::kernel::{median_heuristic, KernelSpec};

pub const NUM_FEATURES: usize = 20;
pub const NOISE_SCALE: f64 = 0.1;
const BLOCK_COVARIANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScenarioKind {
    Null,
    Linear,
    AdditiveNonlinear,
    NonAdditiveNonlinear,
    MultivariateRegression,
    ThreeClass,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::Null,
        ScenarioKind::Linear,
        ScenarioKind::AdditiveNonlinear,
        ScenarioKind::NonAdditiveNonlinear,
        ScenarioKind::MultivariateRegression,
        ScenarioKind::ThreeClass,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Null => "null",
            ScenarioKind::Linear => "linear",
            ScenarioKind::AdditiveNonlinear => "additive",
            ScenarioKind::NonAdditiveNonlinear => "nonadditive",
            ScenarioKind::MultivariateRegression => "multivariate",
            ScenarioKind::ThreeClass => "threeclass",
        }
    }

    /// 0-based indices of the features the response depends on.
    pub fn ground_truth(&self) -> Vec<usize> {
        match self {
            ScenarioKind::Null => vec![],
            ScenarioKind::Linear | ScenarioKind::AdditiveNonlinear | ScenarioKind::NonAdditiveNonlinear => {
                (0..5).collect()
            }
            ScenarioKind::MultivariateRegression => (0..4).collect(),
            ScenarioKind::ThreeClass => vec![0, 1],
        }
    }

    /// Size of the leading equicorrelated block of the input covariance.
    pub fn correlated_block(&self) -> usize {
        match self {
            ScenarioKind::Linear | ScenarioKind::AdditiveNonlinear | ScenarioKind::NonAdditiveNonlinear => 5,
            ScenarioKind::MultivariateRegression => 4,
            ScenarioKind::Null | ScenarioKind::ThreeClass => 0,
        }
    }

    pub fn output_width(&self) -> usize {
        match self {
            ScenarioKind::MultivariateRegression => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = HsicError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.trim().to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match key.as_str() {
            "null" => Ok(ScenarioKind::Null),
            "linear" => Ok(ScenarioKind::Linear),
            "additive" | "additivenonlinear" => Ok(ScenarioKind::AdditiveNonlinear),
            "nonadditive" | "nonadditivenonlinear" => Ok(ScenarioKind::NonAdditiveNonlinear),
            "multivariate" | "multivariateregression" => Ok(ScenarioKind::MultivariateRegression),
            "threeclass" | "multiclass" | "classification" => Ok(ScenarioKind::ThreeClass),
            _ => Err(HsicError::UnknownName { kind: "scenario", name: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub n: usize,
    pub seed: u64,
}

/// Rows from `N(0, Σ̄)`, where features `corr_block` (0-based) share
/// pairwise covariance 0.05 and every feature has unit variance.
pub fn gen_input<R: Rng + ?Sized>(n: usize, d: usize, corr_block: &[usize], rng: &mut R) -> Array2<f64> {
    let own = (1.0 - BLOCK_COVARIANCE).sqrt();
    let shared = BLOCK_COVARIANCE.sqrt();
    let mut x = Array2::zeros((n, d));
    for mut row in x.rows_mut() {
        let common: f64 = StandardNormal.sample(rng);
        for (j, v) in row.iter_mut().enumerate() {
            let e: f64 = StandardNormal.sample(rng);
            *v = if corr_block.contains(&j) { own * e + shared * common } else { e };
        }
    }
    x
}

/// Noise-free response plus `0.1 · noise` for the regression scenarios.
/// `noise` has one column per output dimension.
pub fn response_from(kind: ScenarioKind, x: ArrayView2<f64>, noise: ArrayView2<f64>) -> Result<Array2<f64>> {
    let width = kind.output_width();
    if noise.ncols() != width || noise.nrows() != x.nrows() {
        return Err(HsicError::DimensionMismatch { expected: width, found: noise.ncols() });
    }
    if x.ncols() < 5 {
        return Err(HsicError::DimensionMismatch { expected: NUM_FEATURES, found: x.ncols() });
    }
    let mut y = Array2::zeros((x.nrows(), width));
    for (i, row) in x.rows().into_iter().enumerate() {
        let e = |c: usize| NOISE_SCALE * noise[[i, c]];
        match kind {
            ScenarioKind::Linear => y[[i, 0]] = (0..5).map(|j| row[j]).sum::<f64>() + e(0),
            ScenarioKind::AdditiveNonlinear => y[[i, 0]] = (0..5).map(|j| row[j] * row[j]).sum::<f64>() + e(0),
            ScenarioKind::NonAdditiveNonlinear => {
                y[[i, 0]] = row[0] * row[1].exp() * row[2] * row[3].exp() * row[4] + e(0)
            }
            ScenarioKind::MultivariateRegression => {
                y[[i, 0]] = row[0] + 2.0 * row[1] + e(0);
                y[[i, 1]] = 2.0 * row[0] + row[1] * row[1] + e(1);
                y[[i, 2]] = row[2] * (2.0 * row[3]).exp() + e(2);
            }
            ScenarioKind::Null => y[[i, 0]] = noise[[i, 0]],
            ScenarioKind::ThreeClass => {
                return Err(HsicError::UnknownName { kind: "regression scenario", name: kind.name().into() })
            }
        }
    }
    Ok(y)
}

/// Draws the response for `x`. The null response is `N(0, 1)` independent
/// of `x`.
pub fn gen_response<R: Rng + ?Sized>(kind: ScenarioKind, x: ArrayView2<f64>, rng: &mut R) -> Result<Response> {
    let noise = Array2::from_shape_fn((x.nrows(), kind.output_width()), |_| StandardNormal.sample(rng));
    let y = response_from(kind, x, noise.view())?;
    Ok(match kind {
        ScenarioKind::MultivariateRegression => Response::Multivariate(y),
        _ => Response::Univariate(y.column(0).to_owned()),
    })
}

/// Three equiprobable classes; the first two features follow the
/// class-conditional Gaussians (class 3 is a two-component mixture) and the
/// remaining 18 are independent standard normal.
pub fn gen_three_class<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Array2<f64>, Vec<usize>) {
    let mut x = Array2::zeros((n, NUM_FEATURES));
    let mut labels = Vec::with_capacity(n);
    for mut row in x.rows_mut() {
        let label = rng.random_range(1..=3usize);
        let (m1, m2, sd2) = match label {
            1 => (-3.0, 0.0, 1.0),
            2 => (3.0, 0.0, 1.0),
            _ => {
                let upper = rng.random_bool(0.5);
                (0.0, if upper { 3.0 } else { -3.0 }, 1.5)
            }
        };
        let e1: f64 = StandardNormal.sample(rng);
        let e2: f64 = StandardNormal.sample(rng);
        row[0] = m1 + e1;
        row[1] = m2 + sd2 * e2;
        for v in row.iter_mut().skip(2) {
            *v = StandardNormal.sample(rng);
        }
        labels.push(label);
    }
    (x, labels)
}

/// A generated dataset with its relevant features.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub relevant: Vec<usize>,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, n: usize, seed: u64) -> Self {
        Scenario { kind, n, seed }
    }

    pub fn generate(&self) -> Result<SyntheticData> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (x, response) = match self.kind {
            ScenarioKind::ThreeClass => {
                let (x, labels) = gen_three_class(self.n, &mut rng);
                (x, Response::Categorical { labels, classes: 3 })
            }
            kind => {
                let block: Vec<usize> = (0..kind.correlated_block()).collect();
                let x = gen_input(self.n, NUM_FEATURES, &block, &mut rng);
                let y = gen_response(kind, x.view(), &mut rng)?;
                (x, y)
            }
        };
        Ok(SyntheticData { dataset: Dataset::new(x, response, None)?, relevant: self.kind.ground_truth() })
    }

    /// Output kernel used in the experiments: delta for classes, Gaussian
    /// with the median heuristic for vector outputs, unit Gaussian otherwise.
    pub fn output_kernel(&self, data: &Dataset) -> Result<KernelSpec> {
        match &data.response {
            Response::Categorical { classes, .. } => KernelSpec::delta(*classes),
            Response::Multivariate(y) => KernelSpec::gaussian(median_heuristic(y.view())?),
            Response::Univariate(_) => KernelSpec::gaussian(1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn covariance(x: &Array2<f64>) -> Array2<f64> {
        let n = x.nrows() as f64;
        let mean = x.mean_axis(ndarray::Axis(0)).unwrap();
        let c = x - &mean;
        c.t().dot(&c) / (n - 1.0)
    }

    #[test]
    fn input_covariance_matches_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = gen_input(100_000, NUM_FEATURES, &[0, 1, 2, 3, 4], &mut rng);
        let cov = covariance(&x);
        for i in 0..NUM_FEATURES {
            for j in 0..NUM_FEATURES {
                let target = if i == j {
                    1.0
                } else if i < 5 && j < 5 {
                    0.05
                } else {
                    0.0
                };
                assert!((cov[[i, j]] - target).abs() < 0.02, "({i},{j}) {}", cov[[i, j]]);
            }
        }
    }

    #[test]
    fn empty_block_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = gen_input(100_000, 6, &[], &mut rng);
        let cov = covariance(&x);
        for i in 0..6 {
            for j in 0..6 {
                assert!((cov[[i, j]] - if i == j { 1.0 } else { 0.0 }).abs() < 0.02);
            }
        }
    }

    #[test]
    fn plug_in_values() {
        let zero_noise = Array2::zeros((1, 1));
        let mut x = Array2::zeros((1, NUM_FEATURES));
        for j in 0..5 {
            x[[0, j]] = 1.0;
        }
        let y = response_from(ScenarioKind::Linear, x.view(), zero_noise.view()).unwrap();
        assert_eq!(y[[0, 0]], 5.0);
        let y = response_from(ScenarioKind::AdditiveNonlinear, x.view(), zero_noise.view()).unwrap();
        assert_eq!(y[[0, 0]], 5.0);

        let mut x = Array2::zeros((1, NUM_FEATURES));
        for j in [0, 2, 4] {
            x[[0, j]] = 1.0;
        }
        let y = response_from(ScenarioKind::NonAdditiveNonlinear, x.view(), zero_noise.view()).unwrap();
        assert_eq!(y[[0, 0]], 1.0);

        let mut x = Array2::zeros((1, NUM_FEATURES));
        x[[0, 0]] = 1.0;
        x[[0, 1]] = 2.0;
        x[[0, 2]] = 3.0;
        x[[0, 3]] = 0.5;
        let y = response_from(ScenarioKind::MultivariateRegression, x.view(), Array2::zeros((1, 3)).view()).unwrap();
        assert_eq!(y.row(0).to_vec(), vec![5.0, 6.0, 3.0 * 1f64.exp()]);
    }

    #[test]
    fn noise_enters_scaled() {
        let x = Array2::zeros((1, NUM_FEATURES));
        let noise = Array2::from_elem((1, 1), 2.0);
        let y = response_from(ScenarioKind::Linear, x.view(), noise.view()).unwrap();
        assert!((y[[0, 0]] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn null_response_uncorrelated() {
        let data = Scenario::new(ScenarioKind::Null, 100_000, 4).generate().unwrap();
        let y = match &data.dataset.response {
            Response::Univariate(y) => y.clone(),
            _ => unreachable!(),
        };
        let ym = y.mean().unwrap();
        let ysd = y.std(1.0);
        for col in data.dataset.x.columns() {
            let xm = col.mean().unwrap();
            let cov = col.iter().zip(y.iter()).map(|(a, b)| (a - xm) * (b - ym)).sum::<f64>() / (y.len() - 1) as f64;
            let corr = cov / (col.std(1.0) * ysd);
            assert!(corr.abs() < 0.02, "{corr}");
        }
    }

    #[test]
    fn three_class_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (x, labels) = gen_three_class(300_000, &mut rng);
        let class3: Vec<f64> = labels.iter().enumerate().filter(|(_, &l)| l == 3).map(|(i, _)| x[[i, 1]]).collect();
        assert!(class3.len() > 90_000);
        let m = class3.iter().sum::<f64>() / class3.len() as f64;
        let var = class3.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (class3.len() - 1) as f64;
        // within-component variance 2.25 plus separation 3² = 11.25
        assert!((var - 11.25).abs() < 0.15, "{var}");
        for label in 1..=3 {
            let share = labels.iter().filter(|&&l| l == label).count() as f64 / labels.len() as f64;
            assert!((share - 1.0 / 3.0).abs() < 0.01);
        }
        let class1_mean = labels.iter().enumerate().filter(|(_, &l)| l == 1).map(|(i, _)| x[[i, 0]]).sum::<f64>()
            / labels.iter().filter(|&&l| l == 1).count() as f64;
        assert!((class1_mean + 3.0).abs() < 0.02);
    }

    #[test]
    fn generators_are_seeded() {
        for kind in ScenarioKind::ALL {
            let a = Scenario::new(kind, 50, 9).generate().unwrap();
            let b = Scenario::new(kind, 50, 9).generate().unwrap();
            assert_eq!(a.dataset, b.dataset);
            assert_eq!(a.dataset.d(), NUM_FEATURES);
            assert_eq!(a.dataset.response.width(), kind.output_width());
        }
    }

    #[test]
    fn ground_truth_sets() {
        assert_eq!(ScenarioKind::Linear.ground_truth(), vec![0, 1, 2, 3, 4]);
        assert_eq!(ScenarioKind::Null.ground_truth(), Vec::<usize>::new());
        assert_eq!(ScenarioKind::ThreeClass.ground_truth(), vec![0, 1]);
        assert_eq!(ScenarioKind::MultivariateRegression.ground_truth(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn scenario_names_parse() {
        for kind in ScenarioKind::ALL {
            assert_eq!(kind.name().parse::<ScenarioKind>().unwrap(), kind);
        }
        assert!("bogus".parse::<ScenarioKind>().is_err());
    }
}
