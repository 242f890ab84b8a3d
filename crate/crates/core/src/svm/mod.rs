//! Soft-margin SVM with an RBF kernel, trained by SMO, behind the
//! [`Classifier`](crate::Classifier) contract.

mod kernel;
mod model;
mod smo;
mod standardize;

use serde::{Deserialize, Serialize};

pub use kernel::{rbf, KernelCache, FULL_CACHE_LIMIT};
pub use model::{SvmClassifier, TrainedSvm, MODEL_FORMAT, MODEL_VERSION};
pub use smo::{solve_dual, train_svm, DualSolution};
pub use standardize::{Standardizer, STD_FLOOR};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    /// Box constraint C.
    pub c: f64,
    /// RBF width: k(x, z) = exp(-gamma |x - z|^2).
    pub gamma: f64,
    /// Stop once the maximal KKT violation and the relative primal-dual gap
    /// both fall below this.
    pub kkt_tolerance: f64,
    /// Iteration budget in units of the training-set size.
    pub max_passes: usize,
    /// z-score features with training-fold statistics before fitting.
    pub standardize: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, gamma: 0.1, kkt_tolerance: 1e-3, max_passes: 200, standardize: true }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<(), String> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.c) {
            return Err(format!("svm.c must be positive, got {}", self.c));
        }
        if !positive(self.gamma) {
            return Err(format!("svm.gamma must be positive, got {}", self.gamma));
        }
        if !positive(self.kkt_tolerance) {
            return Err(format!("svm.kkt_tolerance must be positive, got {}", self.kkt_tolerance));
        }
        if self.max_passes == 0 {
            return Err("svm.max_passes must be positive".into());
        }
        Ok(())
    }
}
