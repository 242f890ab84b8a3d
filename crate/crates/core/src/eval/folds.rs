use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::EvalError;
use crate::label::Label;

/// Fold index per example, plus the seed that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FoldPlan {
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.assignments[i] != fold).collect()
    }

    /// (negatives, positives) per fold.
    pub fn class_counts(&self, labels: &[Label]) -> Vec<(usize, usize)> {
        let mut counts = vec![(0, 0); self.k];
        for (&fold, label) in self.assignments.iter().zip(labels) {
            match label {
                Label::Negative => counts[fold].0 += 1,
                Label::Positive => counts[fold].1 += 1,
            }
        }
        counts
    }
}

/// Shuffle each class with a seeded ChaCha8 stream, then deal round-robin.
///
/// Negatives are dealt first and the dealing cursor carries over into the
/// positives, so fold sizes also differ by at most one overall.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<FoldPlan, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidK(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; labels.len()];
    let mut warnings = Vec::new();
    let mut cursor = 0;
    for class in [Label::Negative, Label::Positive] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            return Err(EvalError::SingleClass);
        }
        if members.len() < k {
            warnings.push(format!(
                "class {class} has {} examples for {k} folds; {} folds get none",
                members.len(),
                k - members.len()
            ));
        }
        members.shuffle(&mut rng);
        for i in members {
            assignments[i] = cursor;
            cursor = (cursor + 1) % k;
        }
    }
    Ok(FoldPlan { k, seed, assignments, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(neg: usize, pos: usize) -> Vec<Label> {
        let mut v = vec![Label::Negative; neg];
        v.extend(vec![Label::Positive; pos]);
        v
    }

    #[test]
    fn exact_division() {
        let y = labels(5, 5);
        let plan = stratified_folds(&y, 5, 1).unwrap();
        assert!(plan.class_counts(&y).iter().all(|&c| c == (1, 1)));
        assert!(plan.warnings.is_empty());
    }

    #[test]
    fn nine_positives_eleven_negatives_in_ten_folds() {
        let y = labels(11, 9);
        for seed in [0, 1, 42] {
            let counts = stratified_folds(&y, 10, seed).unwrap().class_counts(&y);
            let mut pos: Vec<usize> = counts.iter().map(|c| c.1).collect();
            let mut neg: Vec<usize> = counts.iter().map(|c| c.0).collect();
            pos.sort_unstable();
            neg.sort_unstable();
            assert_eq!(pos, [0, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
            assert_eq!(neg, [1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
        }
    }

    #[test]
    fn same_seed_same_plan() {
        let y: Vec<Label> = (0..57).map(|i| if i % 4 == 0 { Label::Positive } else { Label::Negative }).collect();
        assert_eq!(stratified_folds(&y, 10, 7).unwrap(), stratified_folds(&y, 10, 7).unwrap());
        assert_ne!(stratified_folds(&y, 10, 7).unwrap().assignments, stratified_folds(&y, 10, 8).unwrap().assignments);
    }

    #[test]
    fn errors_and_warnings() {
        assert_eq!(stratified_folds(&labels(3, 3), 1, 0), Err(EvalError::InvalidK(1)));
        assert_eq!(stratified_folds(&labels(3, 0), 2, 0), Err(EvalError::SingleClass));
        let plan = stratified_folds(&labels(20, 3), 5, 0).unwrap();
        assert_eq!(plan.warnings.len(), 1);
        assert!(plan.warnings[0].contains("class 1"));
    }

    proptest! {
        #[test]
        fn class_counts_stay_within_one_of_proportional(
            neg in 1usize..250, pos in 1usize..250, k in prop::sample::select(vec![2usize, 5, 10]), seed: u64
        ) {
            let y = labels(neg, pos);
            let plan = stratified_folds(&y, k, seed).unwrap();
            prop_assert_eq!(plan.len(), y.len());
            prop_assert!(plan.assignments.iter().all(|&f| f < k));
            for (n_neg, n_pos) in plan.class_counts(&y) {
                prop_assert!((n_neg as f64 - neg as f64 / k as f64).abs() < 1.0);
                prop_assert!((n_pos as f64 - pos as f64 / k as f64).abs() < 1.0);
            }
        }
    }
}
