//! MFCC feature extraction and a cross-validated SVM experiment harness for
//! binary voice-pathology screening.
//!
//! The crate is organised along the processing chain:
//!
//! * [`audio`]: WAV decoding, resampling, segmentation and silence trimming.
//! * [`mfcc`]: framing, Hamming window, radix-2 power spectrum, mel
//!   filterbank, log compression, DCT and mean pooling.
//! * [`svm`]: soft-margin RBF SVM trained with SMO, plus z-score standardization.
//! * [`eval`]: stratified k-fold plans, the metric suite and cross-validation.
//! * [`sweep`]: one-axis parameter sweeps and named parameter combinations.
//! * [`harness`]: manifests, config files, result files and the command runner
//!   behind the `cepsweep` binary.

pub mod audio;
pub mod classifier;
pub mod eval;
pub mod harness;
pub mod mfcc;
pub mod svm;
pub mod sweep;

mod label;

pub use classifier::{Classifier, ClassifierError, Scorer};
pub use label::{Label, LabelParseError};
pub use mfcc::{FeatureVector, MfccConfig};
