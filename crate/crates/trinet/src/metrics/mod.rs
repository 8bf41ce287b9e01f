//! Screening evaluation: confusion matrices, rates with explicit
//! undefined markers, ROC/AUC, PPV-maximizing threshold selection,
//! per-class feature distributions, and literature benchmark constants.

mod benchmark;
mod confusion;
mod features;
mod roc;
mod threshold;

pub use benchmark::{benchmark_lookup, benchmark_table, BenchmarkRow, Method};
pub use confusion::{confusion, rates, ConfusionMatrix, Rates};
pub use features::{feature_distribution, ClassSummary, FeatureDistribution, DEFAULT_BINS};
pub use roc::{roc_auc, RocCurve, RocPoint};
pub use threshold::{
    select_threshold_max_ppv, ThresholdSelection, DEFAULT_MIN_PREDICTED_POSITIVES, DEFAULT_MIN_TPR,
};
