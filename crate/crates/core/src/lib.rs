//! Kernel-based post-selection inference.
//!
//! Features are ranked by a block HSIC score against the response, the top
//! `k` are kept, and each kept feature is tested for dependence with a
//! p-value that conditions on having been selected. The block scores are
//! asymptotically jointly normal, so "these `k` scores were the largest" is a
//! polyhedron in score space and the conditional law of each selected score
//! is a truncated normal.
//!
//! Module map:
//!
//! * [`kernel`]: Gaussian, linear and delta kernels; Gram matrices.
//! * [`block_hsic`]: block partitions and the unbiased within-block estimator.
//! * [`gaussian_model`]: mean and covariance of the score vector.
//! * [`selection_event`]: top-k screening and truncation intervals.
//! * [`truncated_normal`]: tail-stable truncated normal CDF and p-values.
//! * [`pipeline`]: `hsicInf`, the naive baseline and data splitting.
//! * [`synthdata`]: simulation scenarios.
//! * [`harness`]: Monte-Carlo grids with persisted results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod block_hsic;
pub mod dataset;
pub mod error;
pub mod gaussian_model;
pub mod harness;
pub mod kernel;
pub mod pipeline;
pub mod selection_event;
pub mod synthdata;
pub mod truncated_normal;

pub use block_hsic::{hsic_vector, within_block_hsic, BlockPartition, BlockStatistics};
pub use dataset::{Dataset, Response};
pub use error::{HsicError, Result};
pub use gaussian_model::{estimate_covariance, ScoreDistribution};
pub use kernel::{gram_matrix, median_heuristic, one_hot_encode, GramMatrix, KernelSpec};
pub use pipeline::{
    evaluate_report, run, run_hsic_inf, run_split, standardize_features, Evaluation, FeatureResult, InferenceReport,
    Method, PipelineConfig,
};
pub use selection_event::{select_top_k, truncation_interval, ScreeningResult, TruncationInterval};
pub use synthdata::{Scenario, ScenarioKind, SyntheticData};
pub use truncated_normal::{selective_p_value, trunc_norm_cdf, TruncatedNormalParams};
