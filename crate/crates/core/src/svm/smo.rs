//! Sequential minimal optimization for the C-SVM dual
//!
//!   min_a  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,
//!
//! with Q_ij = y_i y_j k(x_i, x_j). Working pairs are chosen as the maximal
//! violating pair (first-order selection); ties go to the lowest index so
//! runs are reproducible. Training stops once both the maximal KKT violation
//! and the relative primal-dual gap fall below the tolerance.

use super::kernel::KernelCache;
use super::model::TrainedSvm;
use super::standardize::Standardizer;
use super::SvmParams;
use crate::classifier::ClassifierError;
use crate::label::Label;

/// Guards the pair update against a non-positive curvature.
const TAU: f64 = 1e-12;

/// Multipliers within this fraction of C from a bound are put on it, so
/// rounding residue (e.g. 1e-16 left by `sum - c`) never counts as free.
const SNAP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution {
    /// One multiplier per training point, in input order.
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Maximal KKT violation m(a) - M(a) at exit.
    pub max_violation: f64,
    /// Relative primal-dual gap at exit, see [`relative_gap`].
    pub duality_gap: f64,
}

fn validate(x: &[Vec<f64>], labels: &[Label]) -> Result<usize, ClassifierError> {
    if x.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    if x.len() != labels.len() {
        return Err(ClassifierError::Other(format!("{} feature rows but {} labels", x.len(), labels.len())));
    }
    let dim = x[0].len();
    for (i, row) in x.iter().enumerate() {
        if row.len() != dim {
            return Err(ClassifierError::DimensionMismatch { expected: dim, got: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(ClassifierError::NonFinite(format!("row {i}")));
        }
    }
    let positives = labels.iter().filter(|l| l.is_positive()).count();
    if positives == 0 || positives == labels.len() {
        return Err(ClassifierError::SingleClass);
    }
    Ok(dim)
}

pub fn solve_dual(x: &[Vec<f64>], labels: &[Label], params: &SvmParams) -> Result<DualSolution, ClassifierError> {
    params.validate().map_err(ClassifierError::Other)?;
    validate(x, labels)?;
    let n = x.len();
    let c = params.c;
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut cache = KernelCache::new(x, params.gamma);
    let max_iterations = params.max_passes.saturating_mul(n);

    let in_up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let in_low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    let mut iterations = 0;
    let mut converged = false;
    let mut max_violation;
    loop {
        let mut i = None;
        let mut g_max = f64::NEG_INFINITY;
        let mut j = None;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > g_max {
                g_max = v;
                i = Some(t);
            }
            if in_low(alpha[t], y[t]) && v < g_min {
                g_min = v;
                j = Some(t);
            }
        }
        let (Some(i), Some(j)) = (i, j) else {
            max_violation = 0.0;
            converged = true;
            break;
        };
        max_violation = g_max - g_min;
        // a violation below tolerance bounds the gap only by about n C tol
        if max_violation < params.kkt_tolerance && relative_gap(&alpha, &grad, &y, c) < params.kkt_tolerance {
            converged = true;
            break;
        }
        if iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let q_i: Vec<f64> = cache.row(i).iter().zip(&y).map(|(k, yt)| y[i] * yt * k).collect();
        let q_j: Vec<f64> = cache.row(j).iter().zip(&y).map(|(k, yt)| y[j] * yt * k).collect();
        let (old_i, old_j) = (alpha[i], alpha[j]);

        if y[i] != y[j] {
            let mut quad = q_i[i] + q_j[j] + 2.0 * q_i[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q_i[i] + q_j[j] - 2.0 * q_i[j];
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        for t in [i, j] {
            if alpha[t] < SNAP * c {
                alpha[t] = 0.0;
            } else if alpha[t] > c - SNAP * c {
                alpha[t] = c;
            }
        }
        let (d_i, d_j) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q_i[t] * d_i + q_j[t] * d_j;
        }
    }

    let bias = -rho(&alpha, &grad, &y, c);
    let duality_gap = relative_gap(&alpha, &grad, &y, c);
    Ok(DualSolution { alpha, bias, iterations, converged, max_violation, duality_gap })
}

/// (P - D) / max(P, 1) for the primal 1/2 |w|^2 + C sum_t max(0, 1 - y_t f(x_t))
/// and the dual e'a - 1/2 a'Qa, using the bias from [`rho`]. Both follow
/// from the gradient, since (Qa)_t = G_t + 1.
fn relative_gap(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let bias = -rho(alpha, grad, y, c);
    let (mut quad, mut sum_alpha, mut hinge) = (0.0, 0.0, 0.0);
    for t in 0..alpha.len() {
        let q_alpha = grad[t] + 1.0;
        quad += alpha[t] * q_alpha;
        sum_alpha += alpha[t];
        hinge += (1.0 - q_alpha - y[t] * bias).max(0.0);
    }
    let primal = 0.5 * quad + c * hinge;
    let dual = sum_alpha - 0.5 * quad;
    (primal - dual) / primal.max(1.0)
}

/// Offset of the decision function: average of y_t G_t over free vectors,
/// or the midpoint of the feasible interval when none are free.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free_count += 1;
            free_sum += yg;
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else {
        (upper + lower) / 2.0
    }
}

/// Train on already-scaled features. The returned model carries an identity
/// standardizer and keeps only vectors with a_i > 0.
pub fn train_svm(x: &[Vec<f64>], labels: &[Label], params: &SvmParams) -> Result<TrainedSvm, ClassifierError> {
    let solution = solve_dual(x, labels, params)?;
    let dim = x[0].len();
    let (support_vectors, dual_coefficients) = solution
        .alpha
        .iter()
        .zip(x.iter().zip(labels))
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, (row, label))| (row.clone(), a * label.sign()))
        .unzip();
    Ok(TrainedSvm {
        support_vectors,
        dual_coefficients,
        bias: solution.bias,
        params: params.clone(),
        standardizer: Standardizer::identity(dim),
        converged: solution.converged,
        iterations: solution.iterations,
    })
}
