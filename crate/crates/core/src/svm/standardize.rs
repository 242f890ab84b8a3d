use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierError;

/// Lower bound on a fitted standard deviation; constant dimensions map to 0.
pub const STD_FLOOR: f64 = 1e-12;

/// Per-dimension z-scoring with statistics from the training rows only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dim: usize) -> Self {
        Self { means: vec![0.0; dim], stds: vec![1.0; dim] }
    }

    /// Population mean and standard deviation per dimension.
    pub fn fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, ClassifierError> {
        let first = rows.first().ok_or(ClassifierError::EmptyTrainingSet)?;
        let dim = first.as_ref().len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; dim];
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(ClassifierError::DimensionMismatch { expected: dim, got: row.len() });
            }
            means.iter_mut().zip(row).for_each(|(m, v)| *m += v);
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; dim];
        for row in rows {
            vars.iter_mut().zip(row.as_ref().iter().zip(&means)).for_each(|(s, (v, m))| *s += (v - m) * (v - m));
        }
        let stds = vars.into_iter().map(|s| (s / n).sqrt().max(STD_FLOOR)).collect();
        Ok(Self { means, stds })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        values.iter().zip(self.means.iter().zip(&self.stds)).map(|(v, (m, s))| (v - m) / s).collect()
    }
}
