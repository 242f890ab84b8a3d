use serde::Serialize;

use super::EvalError;
use crate::label::Label;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfusionMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Nothing was predicted positive, so precision was set to 0.
    pub precision_degenerate: bool,
}

fn check(scores: &[f64], labels: &[Label]) -> Result<(), EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch { scores: scores.len(), labels: labels.len() });
    }
    if scores.is_empty() {
        return Err(EvalError::Empty);
    }
    match scores.iter().find(|s| !s.is_finite()) {
        Some(&s) => Err(EvalError::NonFiniteScore(s)),
        None => Ok(()),
    }
}

/// Predict positive iff `score > threshold`.
pub fn confusion_metrics(scores: &[f64], labels: &[Label], threshold: f64) -> Result<ConfusionMetrics, EvalError> {
    check(scores, labels)?;
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&s, label) in scores.iter().zip(labels) {
        match (s > threshold, label.is_positive()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    Ok(ConfusionMetrics {
        true_positives: tp,
        false_positives: fp,
        true_negatives: tn,
        false_negatives: fn_,
        accuracy: ratio(tp + tn, scores.len()),
        precision,
        recall,
        f1,
        precision_degenerate: tp + fp == 0,
    })
}

/// Scores grouped by value, descending, as (score, positives, negatives).
fn tied_groups(scores: &[f64], labels: &[Label]) -> Vec<(f64, usize, usize)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for i in order {
        let s = scores[i];
        let (p, n) = if labels[i].is_positive() { (1, 0) } else { (0, 1) };
        match groups.last_mut() {
            // == rather than total_cmp so that -0.0 and 0.0 tie
            Some(last) if last.0 == s => {
                last.1 += p;
                last.2 += n;
            }
            _ => groups.push((s, p, n)),
        }
    }
    groups
}

fn class_totals(labels: &[Label], metric: &'static str) -> Result<(usize, usize), EvalError> {
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(EvalError::UndefinedMetric(metric));
    }
    Ok((pos, neg))
}

/// Mann-Whitney form: the fraction of (positive, negative) pairs where the
/// positive scores higher, counting ties as half.
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<f64, EvalError> {
    check(scores, labels)?;
    let (pos, neg) = class_totals(labels, "AUC")?;
    // twice the U statistic, kept in integers so the result is exact
    let mut twice_u: u128 = 0;
    let mut neg_below = neg as u128;
    for (_, p, n) in tied_groups(scores, labels) {
        neg_below -= n as u128;
        twice_u += p as u128 * (2 * neg_below + n as u128);
    }
    Ok(twice_u as f64 / (2.0 * pos as f64 * neg as f64))
}

/// Equal error rate from the empirical ROC.
///
/// Operating points come from thresholds at each distinct score (predict
/// positive iff `score >= t`), plus the all-negative point. Walking from the
/// strictest threshold, FNR - FPR falls from 1 to -1; the EER is read at the
/// first point where it reaches 0, interpolating linearly along the ROC
/// segment that crosses it.
pub fn eer(scores: &[f64], labels: &[Label]) -> Result<f64, EvalError> {
    check(scores, labels)?;
    let (pos, neg) = class_totals(labels, "EER")?;
    let (pos_f, neg_f) = (pos as f64, neg as f64);
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_fpr, mut prev_fnr) = (0.0, 1.0);
    for (_, p, n) in tied_groups(scores, labels) {
        tp += p;
        fp += n;
        let fpr = fp as f64 / neg_f;
        let fnr = (pos - tp) as f64 / pos_f;
        // FNR <= FPR, compared without rounding
        let (lhs, rhs) = ((pos - tp) * neg, fp * pos);
        if lhs == rhs {
            return Ok(fpr);
        }
        if lhs < rhs {
            let d_prev = prev_fnr - prev_fpr;
            let d_here = fnr - fpr;
            let t = d_prev / (d_prev - d_here);
            return Ok(prev_fpr + t * (fpr - prev_fpr));
        }
        prev_fpr = fpr;
        prev_fnr = fnr;
    }
    unreachable!("the loosest threshold has FNR 0 and FPR 1")
}
