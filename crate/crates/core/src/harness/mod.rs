//! Everything behind the `cepsweep` binary: config files, dataset manifests,
//! corpus loading, result files and the synthetic demo corpus.

mod commands;
mod config;
mod corpus;
mod manifest;
mod report;
mod synth;

use serde::Serialize;

pub use commands::{run, Command, RunOptions, RunSummary};
pub use config::{AxisConfig, EvalConfig, HarnessConfig, IoConfig, SweepConfig};
pub use corpus::{load_dataset, LoadedDataset};
pub use manifest::{parse_manifest, parse_manifest_str, Manifest, ManifestEntry};
pub use report::{
    features_csv, folds_csv, results_csv, series_csv, summary_table, write_atomic, DatasetInfo, ResultsDocument,
};
pub use synth::{synth_clip, write_synthetic_corpus, SynthSpec, SYNTH_DATASET};

/// Exit code 1 for bad input (flags, config, manifests, audio), 2 for
/// failures while running.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
    exit_code: i32,
}

#[derive(Serialize)]
struct ErrorDocument<'a> {
    error: ErrorBody<'a>,
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 1,
            HarnessError::Runtime(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Validation(_) => "validation",
            HarnessError::Runtime(_) => "runtime",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            HarnessError::Validation(m) | HarnessError::Runtime(m) => m,
        }
    }

    /// `{"error": {"kind": ..., "message": ..., "exit_code": ...}}`
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorDocument {
            error: ErrorBody { kind: self.kind(), message: self.message(), exit_code: self.exit_code() },
        })
        .expect("error serializes")
    }
}
