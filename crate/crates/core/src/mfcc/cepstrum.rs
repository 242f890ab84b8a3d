use std::f64::consts::PI;

use super::MfccError;

/// Energies below this are clamped before taking log10.
pub const LOG_FLOOR: f64 = 1e-10;

pub fn log_energies(energies: &[f64]) -> Vec<f64> {
    energies.iter().map(|&e| e.max(LOG_FLOOR).log10()).collect()
}

/// C_m = sum_j cos(m * pi / J * (j + 0.5)) * logE_j for m in 0..L.
///
/// No orthonormal scaling: C_0 is the plain sum of the log energies.
#[derive(Clone, Debug, PartialEq)]
pub struct DctMatrix {
    num_filters: usize,
    num_coefficients: usize,
    basis: Vec<f64>,
}

impl DctMatrix {
    pub fn new(num_filters: usize, num_coefficients: usize) -> Self {
        let j_f = num_filters as f64;
        let basis = (0..num_coefficients)
            .flat_map(|m| (0..num_filters).map(move |j| (m as f64 * PI / j_f * (j as f64 + 0.5)).cos()))
            .collect();
        Self { num_filters, num_coefficients, basis }
    }

    pub fn apply<'a>(&'a self, log_e: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        debug_assert_eq!(log_e.len(), self.num_filters);
        self.basis.chunks_exact(self.num_filters).map(move |row| row.iter().zip(log_e).map(|(c, e)| c * e).sum())
    }
}

pub fn dct_coefficients(log_e: &[f64], num_coefficients: usize) -> Result<Vec<f64>, MfccError> {
    if num_coefficients < 1 || num_coefficients > log_e.len() {
        return Err(MfccError::InvalidConfig(format!("need 1 <= L <= J, got L={num_coefficients}, J={}", log_e.len())));
    }
    Ok(DctMatrix::new(log_e.len(), num_coefficients).apply(log_e).collect())
}
