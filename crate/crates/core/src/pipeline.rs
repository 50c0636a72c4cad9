//! End-to-end procedures: selective inference (`hsicInf`), the unadjusted
//! baseline (`hsicNaive`) and three-way data splitting (`split`).
//!
//! All three standardize features on the full sample, shuffle with the
//! configured seed and then split:
//!
//! * `hsicInf` / `hsicNaive`: the first `⌊n/3⌋` shuffled samples estimate the
//!   score covariance, the rest select features and supply the tested scores.
//! * `split`: three parts of `⌊n/3⌋` samples (the last takes the remainder)
//!   estimate the covariance, select, and test, respectively.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::block_hsic::{hsic_vector, BlockPartition, BlockStatistics};
use crate::dataset::Dataset;
use crate::error::{HsicError, Result};
use crate::gaussian_model::{estimate_covariance, ScoreDistribution, DEFAULT_SHRINKAGE};
use crate::kernel::KernelSpec;
use crate::selection_event::{select_top_k, truncation_interval, TruncationInterval};
use crate::truncated_normal::{naive_p_value, selective_p_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    HsicInf,
    HsicNaive,
    Split,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::HsicInf, Method::HsicNaive, Method::Split];

    pub fn name(&self) -> &'static str {
        match self {
            Method::HsicInf => "hsicInf",
            Method::HsicNaive => "hsicNaive",
            Method::Split => "split",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HsicError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hsicinf" => Ok(Method::HsicInf),
            "hsicnaive" | "hsic" | "naive" => Ok(Method::HsicNaive),
            "split" => Ok(Method::Split),
            _ => Err(HsicError::UnknownName { kind: "method", name: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub k: usize,
    pub block_size: usize,
    pub alpha: f64,
    pub shrinkage: f64,
    pub spec_x: KernelSpec,
    pub spec_y: KernelSpec,
    pub method: Method,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k: 10,
            block_size: 10,
            alpha: 0.05,
            shrinkage: DEFAULT_SHRINKAGE,
            spec_x: KernelSpec::Gaussian { bandwidth: 1.0 },
            spec_y: KernelSpec::Gaussian { bandwidth: 1.0 },
            method: Method::HsicInf,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self, d: usize) -> Result<()> {
        if self.k == 0 || self.k >= d {
            return Err(HsicError::InvalidSelectionSize { k: self.k, d });
        }
        if self.block_size < crate::block_hsic::MIN_BLOCK_SIZE {
            return Err(HsicError::BlockSizeTooSmall(self.block_size));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(HsicError::InvalidAlpha(self.alpha));
        }
        if !(0.0..1.0).contains(&self.shrinkage) {
            return Err(HsicError::InvalidShrinkage(self.shrinkage));
        }
        self.spec_x.validate()?;
        self.spec_y.validate()
    }
}

/// One tested feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureResult {
    /// 0-based column index.
    pub index: usize,
    pub name: String,
    pub hsic: f64,
    pub variance: f64,
    pub lower: f64,
    pub upper: f64,
    pub p_value: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub covariance: usize,
    pub selection: usize,
    pub testing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    pub method: Method,
    pub seed: u64,
    pub alpha: f64,
    pub block_size: usize,
    pub n: usize,
    pub d: usize,
    pub splits: SplitSizes,
    /// Selected features in decreasing order of their selection score.
    pub features: Vec<FeatureResult>,
    pub warnings: Vec<String>,
}

impl InferenceReport {
    pub fn rejected(&self) -> impl Iterator<Item = &FeatureResult> {
        self.features.iter().filter(|f| f.reject)
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        self.features.iter().map(|f| f.index).collect()
    }
}

/// Columns scaled to mean 0 and sample standard deviation 1. Constant
/// columns are left untouched and their indices returned.
pub fn standardize_features(x: &Array2<f64>) -> (Array2<f64>, Vec<usize>) {
    let n = x.nrows();
    let mut out = x.clone();
    let mut constant = Vec::new();
    for (m, mut col) in out.columns_mut().into_iter().enumerate() {
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        let sd = var.sqrt();
        if !(sd > 0.0) || !sd.is_finite() {
            constant.push(m);
            continue;
        }
        col.mapv_inplace(|v| (v - mean) / sd);
    }
    (out, constant)
}

/// Runs the configured method.
pub fn run(data: &Dataset, cfg: &PipelineConfig) -> Result<InferenceReport> {
    match cfg.method {
        Method::HsicInf | Method::HsicNaive => run_hsic_inf(data, cfg),
        Method::Split => run_split(data, cfg),
    }
}

struct Prepared {
    data: Dataset,
    order: Vec<usize>,
    warnings: Vec<String>,
}

fn prepare(data: &Dataset, cfg: &PipelineConfig) -> Result<Prepared> {
    cfg.validate(data.d())?;
    let n = data.n();
    let needed = 3 * cfg.block_size;
    if n < needed {
        return Err(HsicError::InsufficientSamples { needed, have: n });
    }
    let (x, constant) = standardize_features(&data.x);
    let warnings: Vec<String> = constant
        .iter()
        .map(|&m| format!("feature {} ({}) is constant; left unscaled", m + 1, data.feature_names[m]))
        .collect();
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    Ok(Prepared {
        data: Dataset { x, response: data.response.clone(), feature_names: data.feature_names.clone() },
        order,
        warnings,
    })
}

fn block_statistics(data: &Dataset, rows: &[usize], cfg: &PipelineConfig) -> Result<(Array1<f64>, BlockStatistics)> {
    let part = data.select_rows(rows);
    let partition = BlockPartition::sequential(part.n(), cfg.block_size)?;
    let y = part.response.as_points();
    hsic_vector(part.x.view(), y.view(), &cfg.spec_x, &cfg.spec_y, &partition)
}

fn covariance_for(stats: &BlockStatistics, tested_blocks: usize, cfg: &PipelineConfig) -> Result<ScoreDistribution> {
    Ok(estimate_covariance(stats, cfg.shrinkage)?.rescaled_to(tested_blocks))
}

fn feature_row(
    data: &Dataset,
    m: usize,
    z: f64,
    variance: f64,
    interval: TruncationInterval,
    p_value: f64,
    alpha: f64,
) -> FeatureResult {
    FeatureResult {
        index: m,
        name: data.feature_names[m].clone(),
        hsic: z,
        variance,
        lower: interval.lower,
        upper: interval.upper,
        p_value,
        reject: p_value < alpha,
    }
}

/// Selective inference after top-k screening. With `Method::HsicNaive` the
/// same scores and selection are tested without truncation.
pub fn run_hsic_inf(data: &Dataset, cfg: &PipelineConfig) -> Result<InferenceReport> {
    let prep = prepare(data, cfg)?;
    let n = data.n();
    let n_cov = n / 3;
    let (cov_rows, inf_rows) = prep.order.split_at(n_cov);

    let (_, cov_stats) = block_statistics(&prep.data, cov_rows, cfg)?;
    let (z, inf_stats) = block_statistics(&prep.data, inf_rows, cfg)?;
    let dist = covariance_for(&cov_stats, inf_stats.num_blocks(), cfg)?;
    let screening = select_top_k(z.view(), cfg.k)?;

    let naive = cfg.method == Method::HsicNaive;
    let features = screening
        .selected
        .iter()
        .map(|&m| {
            let variance = dist.variance(m);
            let (interval, p) = if naive {
                (TruncationInterval::unbounded(), naive_p_value(z[m], variance)?)
            } else {
                let iv = truncation_interval(m, &screening, &dist)?;
                (iv, selective_p_value(z[m], variance, &iv)?)
            };
            Ok(feature_row(&prep.data, m, z[m], variance, interval, p, cfg.alpha))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(InferenceReport {
        method: cfg.method,
        seed: cfg.seed,
        alpha: cfg.alpha,
        block_size: cfg.block_size,
        n,
        d: data.d(),
        splits: SplitSizes { covariance: cov_rows.len(), selection: inf_rows.len(), testing: inf_rows.len() },
        features,
        warnings: prep.warnings,
    })
}

/// Data splitting: select on one third, test on a fresh third with
/// untruncated one-sided normal p-values.
pub fn run_split(data: &Dataset, cfg: &PipelineConfig) -> Result<InferenceReport> {
    let prep = prepare(data, cfg)?;
    let n = data.n();
    let third = n / 3;
    let cov_rows = &prep.order[..third];
    let sel_rows = &prep.order[third..2 * third];
    let test_rows = &prep.order[2 * third..];

    let (_, cov_stats) = block_statistics(&prep.data, cov_rows, cfg)?;
    let (z_sel, _) = block_statistics(&prep.data, sel_rows, cfg)?;
    let (z_test, test_stats) = block_statistics(&prep.data, test_rows, cfg)?;
    let dist = covariance_for(&cov_stats, test_stats.num_blocks(), cfg)?;
    let screening = select_top_k(z_sel.view(), cfg.k)?;

    let features = screening
        .selected
        .iter()
        .map(|&m| {
            let variance = dist.variance(m);
            let p = naive_p_value(z_test[m], variance)?;
            Ok(feature_row(&prep.data, m, z_test[m], variance, TruncationInterval::unbounded(), p, cfg.alpha))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(InferenceReport {
        method: Method::Split,
        seed: cfg.seed,
        alpha: cfg.alpha,
        block_size: cfg.block_size,
        n,
        d: data.d(),
        splits: SplitSizes { covariance: cov_rows.len(), selection: sel_rows.len(), testing: test_rows.len() },
        features,
        warnings: prep.warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Rejected relevant features over all relevant ones; `None` when no
    /// feature is relevant.
    pub tpr: Option<f64>,
    /// Rejected irrelevant features over the number tested.
    pub fpr: f64,
}

/// True and false positive rates of a report against known relevant
/// feature indices (0-based).
pub fn evaluate_report(report: &InferenceReport, relevant: &[usize]) -> Evaluation {
    let true_hits = report.rejected().filter(|f| relevant.contains(&f.index)).count();
    let false_hits = report.rejected().count() - true_hits;
    let tpr = (!relevant.is_empty()).then(|| true_hits as f64 / relevant.len() as f64);
    let fpr = if report.features.is_empty() { 0.0 } else { false_hits as f64 / report.features.len() as f64 };
    Evaluation { tpr, fpr }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Response;
    use ndarray::array;
    use rand_distr::{Distribution, StandardNormal};

    fn null_data(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, d), |_| StandardNormal.sample(&mut rng));
        let y = Array1::from_shape_fn(n, |_| StandardNormal.sample(&mut rng));
        Dataset::new(x, Response::Univariate(y), None).unwrap()
    }

    #[test]
    fn standardize_examples() {
        let x = array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]];
        let (s, constant) = standardize_features(&x);
        assert_eq!(constant, vec![1]);
        assert_eq!(s.column(0).to_vec(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(s.column(1), x.column(1));
    }

    #[test]
    fn standardize_is_idempotent() {
        let d = null_data(50, 4, 1);
        let (once, _) = standardize_features(&d.x.mapv(|v| 3.0 * v + 2.0));
        let (twice, _) = standardize_features(&once);
        for (a, b) in once.iter().zip(twice.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        for col in once.columns() {
            assert!(col.mean().unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn naive_and_selective_share_selection() {
        let data = null_data(300, 20, 5);
        let cfg = PipelineConfig { seed: 77, ..Default::default() };
        let inf = run(&data, &cfg).unwrap();
        let naive = run(&data, &PipelineConfig { method: Method::HsicNaive, ..cfg.clone() }).unwrap();
        assert_eq!(inf.selected_indices(), naive.selected_indices());
        assert_eq!(inf.features.len(), 10);
        for (a, b) in inf.features.iter().zip(&naive.features) {
            assert_eq!(a.hsic, b.hsic);
            assert_eq!(b.lower, f64::NEG_INFINITY);
            assert!(a.lower <= a.hsic && a.hsic <= a.upper);
            assert!((0.0..=1.0).contains(&a.p_value));
            assert_eq!(a.reject, a.p_value < 0.05);
        }
        assert_eq!(inf.splits, SplitSizes { covariance: 100, selection: 200, testing: 200 });
    }

    #[test]
    fn reports_are_deterministic() {
        let data = null_data(120, 6, 9);
        for method in Method::ALL {
            let cfg = PipelineConfig { k: 3, method, seed: 3, ..Default::default() };
            assert_eq!(run(&data, &cfg).unwrap(), run(&data, &cfg).unwrap());
        }
    }

    #[test]
    fn split_sizes_and_boundary() {
        let data = null_data(61, 5, 2);
        let cfg = PipelineConfig { k: 2, method: Method::Split, ..Default::default() };
        let r = run(&data, &cfg).unwrap();
        assert_eq!(r.splits, SplitSizes { covariance: 20, selection: 20, testing: 21 });
        // n = 3B leaves one block for the covariance, which cannot be estimated
        let data = null_data(30, 5, 2);
        assert_eq!(run(&data, &cfg), Err(HsicError::TooFewBlocks(1)));
        assert_eq!(
            run(&data, &PipelineConfig { method: Method::HsicInf, ..cfg.clone() }),
            Err(HsicError::TooFewBlocks(1))
        );
        let data = null_data(29, 5, 2);
        assert!(matches!(run(&data, &cfg), Err(HsicError::InsufficientSamples { needed: 30, have: 29 })));
    }

    #[test]
    fn config_validation() {
        let data = null_data(60, 5, 2);
        let bad = [
            PipelineConfig { k: 5, ..Default::default() },
            PipelineConfig { k: 2, block_size: 3, ..Default::default() },
            PipelineConfig { k: 2, alpha: 1.0, ..Default::default() },
            PipelineConfig { k: 2, shrinkage: 1.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(run(&data, &cfg).is_err(), "{cfg:?}");
        }
    }

    fn report_with(rejects: &[(usize, bool)]) -> InferenceReport {
        InferenceReport {
            method: Method::HsicInf,
            seed: 0,
            alpha: 0.05,
            block_size: 10,
            n: 0,
            d: 20,
            splits: SplitSizes { covariance: 0, selection: 0, testing: 0 },
            features: rejects
                .iter()
                .map(|&(index, reject)| FeatureResult {
                    index,
                    name: String::new(),
                    hsic: 0.0,
                    variance: 1.0,
                    lower: f64::NEG_INFINITY,
                    upper: f64::INFINITY,
                    p_value: if reject { 0.01 } else { 0.5 },
                    reject,
                })
                .collect(),
            warnings: vec![],
        }
    }

    #[test]
    fn evaluation_examples() {
        let relevant = [0, 1, 2, 3, 4];
        let all_true: Vec<(usize, bool)> = (0..10).map(|i| (i, i < 5)).collect();
        assert_eq!(evaluate_report(&report_with(&all_true), &relevant), Evaluation { tpr: Some(1.0), fpr: 0.0 });
        let none: Vec<(usize, bool)> = (0..10).map(|i| (i, false)).collect();
        assert_eq!(evaluate_report(&report_with(&none), &relevant), Evaluation { tpr: Some(0.0), fpr: 0.0 });
        let mixed: Vec<(usize, bool)> = (0..10).map(|i| (i, i < 3 || i == 7 || i == 9)).collect();
        assert_eq!(evaluate_report(&report_with(&mixed), &relevant), Evaluation { tpr: Some(0.6), fpr: 0.2 });
        assert_eq!(evaluate_report(&report_with(&mixed), &[]).tpr, None);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("hsic".parse::<Method>().unwrap(), Method::HsicNaive);
        assert!("lasso".parse::<Method>().is_err());
    }
}
