use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{stratified_folds, FoldPlan};
use super::metrics::{auc, confusion_metrics, eer};
use super::EvalError;
use crate::classifier::{Classifier, Scorer};
use crate::label::Label;
use crate::mfcc::FeatureVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSettings {
    pub k: usize,
    pub seed: u64,
    /// Keep only examples whose group equals this before folding.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

impl Default for CvSettings {
    fn default() -> Self {
        Self { k: 10, seed: 0, group: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Accuracy,
    Auc,
    F1,
    Precision,
    Eer,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Accuracy, Metric::Auc, Metric::F1, Metric::Precision, Metric::Eer];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Auc => "auc",
            Metric::F1 => "f1",
            Metric::Precision => "precision",
            Metric::Eer => "eer",
        }
    }

    pub fn fold_value(self, fold: &FoldMetrics) -> Option<f64> {
        match self {
            Metric::Accuracy => Some(fold.accuracy),
            Metric::Auc => fold.auc,
            Metric::F1 => Some(fold.f1),
            Metric::Precision => Some(fold.precision),
            Metric::Eer => fold.eer,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub f1: f64,
    /// Missing when the test fold holds a single class.
    pub auc: Option<f64>,
    pub eer: Option<f64>,
    pub precision_degenerate: bool,
}

/// Mean and population standard deviation over the folds where the metric
/// is defined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub folds: usize,
}

impl MetricSummary {
    fn over(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: None, std: None, folds: 0 };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self { mean: Some(mean), std: Some(var.sqrt()), folds: values.len() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub k: usize,
    pub seed: u64,
    pub n_examples: usize,
    pub group: Option<String>,
    pub folds: Vec<FoldMetrics>,
    pub accuracy: MetricSummary,
    pub auc: MetricSummary,
    pub f1: MetricSummary,
    pub precision: MetricSummary,
    pub eer: MetricSummary,
    pub warnings: Vec<String>,
}

impl MetricsRecord {
    pub fn summary(&self, metric: Metric) -> &MetricSummary {
        match metric {
            Metric::Accuracy => &self.accuracy,
            Metric::Auc => &self.auc,
            Metric::F1 => &self.f1,
            Metric::Precision => &self.precision,
            Metric::Eer => &self.eer,
        }
    }

    fn from_folds(plan: &FoldPlan, group: Option<String>, folds: Vec<FoldMetrics>, warnings: Vec<String>) -> Self {
        let summarize = |m: Metric| {
            let values: Vec<f64> = folds.iter().filter_map(|f| m.fold_value(f)).collect();
            MetricSummary::over(&values)
        };
        Self {
            k: plan.k,
            seed: plan.seed,
            n_examples: plan.len(),
            group,
            accuracy: summarize(Metric::Accuracy),
            auc: summarize(Metric::Auc),
            f1: summarize(Metric::F1),
            precision: summarize(Metric::Precision),
            eer: summarize(Metric::Eer),
            folds,
            warnings,
        }
    }
}

fn labels_of(features: &[&FeatureVector]) -> Result<Vec<Label>, EvalError> {
    features.iter().map(|fv| fv.label.ok_or_else(|| EvalError::Unlabeled(fv.id.clone()))).collect()
}

/// Optional group filter, stratified folds from `settings`, then
/// [`cross_validate_with_plan`].
pub fn cross_validate<C: Classifier>(
    features: &[FeatureVector],
    classifier: &C,
    settings: &CvSettings,
) -> Result<MetricsRecord, EvalError> {
    let selected: Vec<&FeatureVector> = match &settings.group {
        Some(g) => features.iter().filter(|fv| fv.group.as_deref() == Some(g.as_str())).collect(),
        None => features.iter().collect(),
    };
    if selected.is_empty() {
        return Err(match &settings.group {
            Some(g) => EvalError::EmptyGroup(g.clone()),
            None => EvalError::Empty,
        });
    }
    let labels = labels_of(&selected)?;
    let plan = stratified_folds(&labels, settings.k, settings.seed)?;
    let mut record = cross_validate_with_plan(&selected, classifier, &plan)?;
    record.group = settings.group.clone();
    Ok(record)
}

struct FoldOutcome {
    metrics: FoldMetrics,
    warnings: Vec<String>,
}

fn run_fold<C: Classifier>(
    features: &[&FeatureVector],
    labels: &[Label],
    classifier: &C,
    plan: &FoldPlan,
    fold: usize,
) -> Result<FoldOutcome, EvalError> {
    let train: Vec<&FeatureVector> = plan.train_indices(fold).into_iter().map(|i| features[i]).collect();
    let test = plan.test_indices(fold);
    let model = classifier.fit(&train).map_err(|source| EvalError::Classifier { fold, source })?;
    let scores = test
        .iter()
        .map(|&i| model.score(&features[i].values))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|source| EvalError::Classifier { fold, source })?;
    let test_labels: Vec<Label> = test.iter().map(|&i| labels[i]).collect();

    let mut warnings: Vec<String> = model.warnings().into_iter().map(|w| format!("fold {fold}: {w}")).collect();
    let confusion = confusion_metrics(&scores, &test_labels, 0.0)?;
    if confusion.precision_degenerate {
        warnings.push(format!("fold {fold}: no positive predictions; precision recorded as 0"));
    }
    let ranked = match (auc(&scores, &test_labels), eer(&scores, &test_labels)) {
        (Ok(a), Ok(e)) => Some((a, e)),
        (Err(EvalError::UndefinedMetric(_)), _) | (_, Err(EvalError::UndefinedMetric(_))) => {
            warnings.push(format!("fold {fold}: test set has a single class; AUC and EER not recorded"));
            None
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(FoldOutcome {
        metrics: FoldMetrics {
            fold,
            n_train: train.len(),
            n_test: test.len(),
            accuracy: confusion.accuracy,
            precision: confusion.precision,
            f1: confusion.f1,
            auc: ranked.map(|r| r.0),
            eer: ranked.map(|r| r.1),
            precision_degenerate: confusion.precision_degenerate,
        },
        warnings,
    })
}

/// Fit on k-1 folds, score the held-out fold, for every fold of `plan`.
/// The classifier only ever sees the training rows of the fold it is fitted
/// for, so any scaling it learns stays leakage-free.
pub fn cross_validate_with_plan<C: Classifier>(
    features: &[&FeatureVector],
    classifier: &C,
    plan: &FoldPlan,
) -> Result<MetricsRecord, EvalError> {
    if features.len() != plan.len() {
        return Err(EvalError::LengthMismatch { scores: features.len(), labels: plan.len() });
    }
    if plan.len() < plan.k {
        return Err(EvalError::TooFewExamples { n: plan.len(), k: plan.k });
    }
    let labels = labels_of(features)?;
    let outcomes = (0..plan.k)
        .into_par_iter()
        .map(|fold| run_fold(features, &labels, classifier, plan, fold))
        .collect::<Result<Vec<_>, _>>()?;

    let mut warnings = plan.warnings.clone();
    let mut folds = Vec::with_capacity(plan.k);
    for outcome in outcomes {
        warnings.extend(outcome.warnings);
        folds.push(outcome.metrics);
    }
    Ok(MetricsRecord::from_folds(plan, None, folds, warnings))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;
    use std::sync::Mutex;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::classifier::ClassifierError;
    use crate::svm::{Standardizer, SvmClassifier, SvmParams};

    fn dataset(n: usize, seed: u64) -> Vec<FeatureVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let label = if i % 3 == 0 { Label::Positive } else { Label::Negative };
                let shift = if label.is_positive() { 1.5 } else { 0.0 };
                let values = (0..4).map(|_| rng.gen_range(-1.0..1.0) + shift).collect();
                let group = if i % 2 == 0 { "F" } else { "M" };
                FeatureVector::new(format!("x{i}"), values).with_label(label).with_group(Some(group.to_string()))
            })
            .collect()
    }

    /// Scores with the true label; useful as an upper bound.
    struct Oracle;
    struct OracleModel(Vec<(Vec<f64>, Label)>);

    impl Scorer for OracleModel {
        fn score(&self, values: &[f64]) -> Result<f64, ClassifierError> {
            Ok(self.0.iter().find(|(v, _)| v == values).map_or(0.0, |(_, l)| l.sign()))
        }
    }

    impl Classifier for Oracle {
        type Model = OracleModel;
        fn name(&self) -> &str {
            "oracle"
        }
        fn fit(&self, _: &[&FeatureVector]) -> Result<OracleModel, ClassifierError> {
            let all = dataset(60, 3);
            Ok(OracleModel(all.into_iter().map(|fv| (fv.values, fv.label.unwrap())).collect()))
        }
    }

    struct Constant;
    impl Scorer for Constant {
        fn score(&self, _: &[f64]) -> Result<f64, ClassifierError> {
            Ok(0.25)
        }
    }
    impl Classifier for Constant {
        type Model = Constant;
        fn name(&self) -> &str {
            "constant"
        }
        fn fit(&self, _: &[&FeatureVector]) -> Result<Constant, ClassifierError> {
            Ok(Constant)
        }
    }

    /// Wraps the SVM and records which rows each fit saw, and the scaling it learned.
    struct Spy {
        inner: SvmClassifier,
        seen: Mutex<Vec<(BTreeSet<String>, Standardizer)>>,
    }

    impl Classifier for Spy {
        type Model = <SvmClassifier as Classifier>::Model;
        fn name(&self) -> &str {
            "spy"
        }
        fn fit(&self, train: &[&FeatureVector]) -> Result<Self::Model, ClassifierError> {
            let model = self.inner.fit(train)?;
            let ids = train.iter().map(|fv| fv.id.clone()).collect();
            self.seen.lock().unwrap().push((ids, model.standardizer.clone()));
            Ok(model)
        }
    }

    #[test]
    fn oracle_scores_give_perfect_accuracy() {
        let data = dataset(60, 3);
        let r = cross_validate(&data, &Oracle, &CvSettings::default()).unwrap();
        assert_eq!(r.accuracy.mean, Some(1.0));
        assert_eq!(r.accuracy.std, Some(0.0));
        assert_eq!(r.eer.mean, Some(0.0));
        assert_eq!(r.folds.len(), 10);
    }

    #[test]
    fn constant_scores_give_chance_auc_every_fold() {
        let data = dataset(60, 3);
        let r = cross_validate(&data, &Constant, &CvSettings::default()).unwrap();
        assert!(r.folds.iter().all(|f| f.auc == Some(0.5)));
        // everything predicted positive: precision is the positive rate
        assert!(r.folds.iter().all(|f| !f.precision_degenerate));
    }

    #[test]
    fn standardizer_only_sees_training_rows() {
        let data = dataset(50, 9);
        let spy = Spy { inner: SvmClassifier::default(), seen: Mutex::new(Vec::new()) };
        let settings = CvSettings { k: 5, seed: 4, group: None };
        cross_validate(&data, &spy, &settings).unwrap();

        let labels: Vec<Label> = data.iter().map(|fv| fv.label.unwrap()).collect();
        let plan = stratified_folds(&labels, 5, 4).unwrap();
        let seen = spy.seen.into_inner().unwrap();
        assert_eq!(seen.len(), 5);
        for fold in 0..5 {
            let test: BTreeSet<String> = plan.test_indices(fold).iter().map(|&i| data[i].id.clone()).collect();
            let train_rows: Vec<&[f64]> = plan.train_indices(fold).iter().map(|&i| data[i].values.as_slice()).collect();
            let expected = Standardizer::fit(&train_rows).unwrap();
            let (ids, scaler) = seen
                .iter()
                .find(|(ids, _)| ids.len() == train_rows.len() && ids.is_disjoint(&test))
                .unwrap_or_else(|| panic!("no fit matched fold {fold}"));
            assert_eq!(ids.len() + test.len(), data.len());
            assert_eq!(scaler, &expected);
        }
    }

    #[test]
    fn svm_runs_are_bit_identical_for_a_seed() {
        let data = dataset(80, 11);
        let clf = SvmClassifier::new(SvmParams::default());
        let settings = CvSettings { k: 10, seed: 5, group: None };
        let a = cross_validate(&data, &clf, &settings).unwrap();
        let b = cross_validate(&data, &clf, &settings).unwrap();
        assert_eq!(a, b);
        assert!(a.accuracy.mean.unwrap() > 0.7);
        assert_eq!(a.folds.len(), 10);
        for m in Metric::ALL {
            let s = a.summary(m);
            assert_eq!(s.folds, 10);
            assert!(s.std.unwrap() >= 0.0);
        }
    }

    #[test]
    fn group_filter_restricts_the_dataset() {
        let data = dataset(60, 3);
        let settings = CvSettings { k: 5, seed: 0, group: Some("F".into()) };
        let r = cross_validate(&data, &Oracle, &settings).unwrap();
        assert_eq!(r.n_examples, 30);
        assert_eq!(r.group.as_deref(), Some("F"));
        let missing = CvSettings { group: Some("X".into()), ..settings };
        assert_eq!(cross_validate(&data, &Oracle, &missing), Err(EvalError::EmptyGroup("X".into())));
    }

    #[test]
    fn single_class_test_fold_drops_ranking_metrics() {
        // 2 positives in 4 folds: two folds hold only negatives
        let mut data = dataset(12, 1);
        for (i, fv) in data.iter_mut().enumerate() {
            fv.label = Some(if i < 2 { Label::Positive } else { Label::Negative });
        }
        let plan = stratified_folds(&data.iter().map(|f| f.label.unwrap()).collect::<Vec<_>>(), 4, 0).unwrap();
        let refs: Vec<&FeatureVector> = data.iter().collect();
        let r = cross_validate_with_plan(&refs, &Oracle, &plan).unwrap();
        assert_eq!(r.auc.folds, 2);
        assert_eq!(r.accuracy.folds, 4);
        assert_eq!(r.folds.iter().filter(|f| f.auc.is_none()).count(), 2);
        assert!(r.warnings.iter().any(|w| w.contains("single class")));
        assert!(r.warnings.iter().any(|w| w.contains("class 1 has 2 examples")));
    }

    #[test]
    fn too_few_examples_and_unlabeled_rows() {
        let data = dataset(6, 1);
        let settings = CvSettings { k: 10, ..CvSettings::default() };
        assert_eq!(cross_validate(&data, &Constant, &settings), Err(EvalError::TooFewExamples { n: 6, k: 10 }));
        let mut data = dataset(12, 1);
        data[3].label = None;
        assert_eq!(
            cross_validate(&data, &Constant, &CvSettings { k: 2, ..CvSettings::default() }),
            Err(EvalError::Unlabeled("x3".into()))
        );
    }

    #[test]
    fn summary_uses_population_std() {
        let s = MetricSummary::over(&[1.0, 0.0]);
        assert_eq!((s.mean, s.std, s.folds), (Some(0.5), Some(0.5), 2));
        assert_eq!(MetricSummary::over(&[]).mean, None);
    }
}
