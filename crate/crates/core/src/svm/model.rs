use serde::{Deserialize, Serialize};

use super::kernel::rbf;
use super::smo::train_svm;
use super::standardize::Standardizer;
use super::SvmParams;
use crate::classifier::{Classifier, ClassifierError, Scorer};
use crate::label::Label;
use crate::mfcc::FeatureVector;

pub const MODEL_FORMAT: &str = "cepsweep-svm";
pub const MODEL_VERSION: u32 = 1;

/// A fitted RBF SVM. Support vectors live in standardized space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedSvm {
    pub support_vectors: Vec<Vec<f64>>,
    /// a_i * y_i for each support vector.
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub params: SvmParams,
    pub standardizer: Standardizer,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    model: T,
}

impl TrainedSvm {
    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    /// Versioned JSON dump. Floats are written shortest-round-trip, so a
    /// reloaded model scores bit-identically.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&Envelope {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            model: self,
        })
        .expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifierError> {
        let env: Envelope<TrainedSvm> =
            serde_json::from_str(text).map_err(|e| ClassifierError::Other(format!("bad model file: {e}")))?;
        if env.format != MODEL_FORMAT {
            return Err(ClassifierError::Other(format!("not an SVM model file: format {:?}", env.format)));
        }
        if env.version != MODEL_VERSION {
            return Err(ClassifierError::Other(format!("unsupported model version {}", env.version)));
        }
        Ok(env.model)
    }
}

impl Scorer for TrainedSvm {
    /// sum_i a_i y_i k(x_i, v) + b on the standardized input.
    fn score(&self, values: &[f64]) -> Result<f64, ClassifierError> {
        if values.len() != self.dim() {
            return Err(ClassifierError::DimensionMismatch { expected: self.dim(), got: values.len() });
        }
        let z = self.standardizer.apply(values);
        let gamma = self.params.gamma;
        let sum: f64 =
            self.support_vectors.iter().zip(&self.dual_coefficients).map(|(sv, coef)| coef * rbf(sv, &z, gamma)).sum();
        Ok(sum + self.bias)
    }

    fn warnings(&self) -> Vec<String> {
        if self.converged {
            Vec::new()
        } else {
            vec![format!(
                "SMO stopped after {} iterations without reaching KKT tolerance {}",
                self.iterations, self.params.kkt_tolerance
            )]
        }
    }
}

/// Standardize-then-SVM template used by cross-validation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SvmClassifier {
    pub params: SvmParams,
}

impl SvmClassifier {
    pub fn new(params: SvmParams) -> Self {
        Self { params }
    }
}

impl Classifier for SvmClassifier {
    type Model = TrainedSvm;

    fn name(&self) -> &str {
        "svm"
    }

    fn fit(&self, train: &[&FeatureVector]) -> Result<TrainedSvm, ClassifierError> {
        if train.is_empty() {
            return Err(ClassifierError::EmptyTrainingSet);
        }
        let labels: Vec<Label> = train
            .iter()
            .map(|fv| fv.label.ok_or_else(|| ClassifierError::Unlabeled(fv.id.clone())))
            .collect::<Result<_, _>>()?;
        let raw: Vec<&[f64]> = train.iter().map(|fv| fv.values.as_slice()).collect();
        let standardizer =
            if self.params.standardize { Standardizer::fit(&raw)? } else { Standardizer::identity(raw[0].len()) };
        let scaled: Vec<Vec<f64>> = raw.iter().map(|r| standardizer.apply(r)).collect();
        let mut model = train_svm(&scaled, &labels, &self.params)?;
        model.standardizer = standardizer;
        Ok(model)
    }
}
