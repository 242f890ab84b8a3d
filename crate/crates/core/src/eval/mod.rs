//! Stratified k-fold cross-validation and the metric suite: accuracy,
//! precision, F1, ROC AUC and equal error rate.

mod cv;
mod folds;
mod metrics;

use thiserror::Error;

use crate::classifier::ClassifierError;

pub use cv::{cross_validate, cross_validate_with_plan, CvSettings, FoldMetrics, Metric, MetricSummary, MetricsRecord};
pub use folds::{stratified_folds, FoldPlan};
pub use metrics::{auc, confusion_metrics, eer, ConfusionMetrics};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("{0} needs at least one positive and one negative example")]
    UndefinedMetric(&'static str),
    #[error("{scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("no examples to evaluate")]
    Empty,
    #[error("only {n} examples for {k} folds; every fold needs a test example")]
    TooFewExamples { n: usize, k: usize },
    #[error("dataset has a single class; stratified folds need both labels")]
    SingleClass,
    #[error("feature vector {0:?} has no label")]
    Unlabeled(String),
    #[error("group {0:?} matches no examples")]
    EmptyGroup(String),
    #[error("non-finite score {0}")]
    NonFiniteScore(f64),
    #[error("fold {fold}: {source}")]
    Classifier {
        fold: usize,
        #[source]
        source: ClassifierError,
    },
}
