//! One-axis parameter sweeps and named parameter combinations, each grid
//! point evaluated by stratified cross-validation over a labelled corpus.

mod cache;
mod grid;
mod run;

use thiserror::Error;

use crate::eval::EvalError;
use crate::mfcc::MfccError;

pub use cache::FeatureCache;
pub use grid::{GridAxis, MfccOverrides, NamedCombination, SweepParameter};
pub use run::{corpus_features, improvement, Corpus, Experiment, Improvement, LabeledSegment, SweepResult};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid configuration: {0}")]
    Config(#[from] MfccError),
    #[error("segment {segment}: {source}")]
    Extraction {
        segment: String,
        #[source]
        source: MfccError,
    },
    #[error("segment {segment} is {found} Hz but the config expects {expected} Hz")]
    SampleRate { segment: String, found: u32, expected: u32 },
    #[error("feature cache holds a different config under digest {0}")]
    DigestCollision(String),
    #[error("corpus {0:?} has no segments")]
    EmptyCorpus(String),
    #[error("invalid axis: {0}")]
    Axis(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
