//! The contract every binary classifier in the harness satisfies.
//!
//! Cross-validation only ever talks to these two traits, so a second model
//! can be dropped in next to the SVM for cross-model comparisons.

use thiserror::Error;

use crate::mfcc::FeatureVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set contains a single class; need at least one example of each label")]
    SingleClass,
    #[error("feature vector {0:?} has no label")]
    Unlabeled(String),
    #[error("dimension mismatch: model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite feature value in {0:?}")]
    NonFinite(String),
    #[error("{0}")]
    Other(String),
}

/// A fitted model. Higher scores mean "more likely positive"; the decision
/// threshold is 0 with ties going to the negative class.
pub trait Scorer {
    fn score(&self, values: &[f64]) -> Result<f64, ClassifierError>;

    /// Non-fatal training diagnostics (e.g. solver did not converge).
    fn warnings(&self) -> Vec<String> {
        Vec::new()
    }
}

/// An unfitted model template.
pub trait Classifier: Sync {
    type Model: Scorer + Send;

    fn name(&self) -> &str;

    /// Fit on labelled training rows. Implementations must only look at the
    /// rows they are given; cross-validation relies on this for leakage-free folds.
    fn fit(&self, train: &[&FeatureVector]) -> Result<Self::Model, ClassifierError>;
}
