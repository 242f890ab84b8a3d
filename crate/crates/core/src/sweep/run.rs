use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use super::cache::FeatureCache;
use super::grid::{GridAxis, NamedCombination, SweepParameter};
use super::SweepError;
use crate::audio::Segment;
use crate::classifier::Classifier;
use crate::eval::{cross_validate, CvSettings, Metric, MetricsRecord};
use crate::label::Label;
use crate::mfcc::{FeatureVector, MfccConfig, MfccExtractor};

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSegment {
    pub segment: Segment,
    pub label: Label,
    pub group: Option<String>,
}

/// Preprocessed, labelled segments of one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub name: String,
    pub items: Vec<LabeledSegment>,
}

/// Pooled MFCC vectors for every segment of `corpus`, in corpus order.
pub fn corpus_features(
    corpus: &Corpus,
    cfg: &MfccConfig,
    cache: &FeatureCache,
) -> Result<Vec<FeatureVector>, SweepError> {
    if corpus.items.is_empty() {
        return Err(SweepError::EmptyCorpus(corpus.name.clone()));
    }
    let extractor = MfccExtractor::new(cfg)?;
    if let Some(bad) = corpus.items.iter().find(|it| it.segment.sample_rate != cfg.sample_rate) {
        return Err(SweepError::SampleRate {
            segment: bad.segment.id(),
            found: bad.segment.sample_rate,
            expected: cfg.sample_rate,
        });
    }
    corpus
        .items
        .par_iter()
        .map(|item| {
            let values = cache.get_or_extract(&item.segment, &extractor)?;
            Ok(FeatureVector::new(item.segment.id(), values.as_ref().clone())
                .with_label(item.label)
                .with_group(item.group.clone()))
        })
        .collect()
}

/// Cross-validated metrics for one MFCC configuration. A failed point keeps
/// its config and the reason instead of being dropped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub dataset: String,
    /// Combination name, or `<parameter>=<value>` for axis points.
    pub name: String,
    pub axis: Option<SweepParameter>,
    pub value: Option<f64>,
    pub grid_point: MfccConfig,
    pub digest: String,
    pub metrics: Option<MetricsRecord>,
    pub error: Option<String>,
    pub warnings: Vec<String>,
    /// Seconds spent on this point; left out of result files so reruns match.
    #[serde(skip)]
    pub wall_time: f64,
}

impl SweepResult {
    pub fn succeeded(&self) -> bool {
        self.metrics.is_some()
    }

    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.metrics.as_ref().and_then(|m| m.summary(metric).mean)
    }

    pub fn std(&self, metric: Metric) -> Option<f64> {
        self.metrics.as_ref().and_then(|m| m.summary(metric).std)
    }
}

/// Everything a grid point needs besides its config: the data, an unfitted
/// classifier, fold settings, the shared feature cache and a worker pool.
pub struct Experiment<'a, C: Classifier> {
    pub corpus: &'a Corpus,
    pub classifier: &'a C,
    pub cv: CvSettings,
    pub cache: &'a FeatureCache,
    pool: ThreadPool,
}

impl<'a, C: Classifier> Experiment<'a, C> {
    /// `jobs = 0` lets the pool pick one thread per core.
    pub fn new(
        corpus: &'a Corpus,
        classifier: &'a C,
        cv: CvSettings,
        cache: &'a FeatureCache,
        jobs: usize,
    ) -> Result<Self, SweepError> {
        let pool =
            rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| SweepError::Pool(e.to_string()))?;
        Ok(Self { corpus, classifier, cv, cache, pool })
    }

    pub fn evaluate(&self, cfg: &MfccConfig) -> Result<MetricsRecord, SweepError> {
        self.pool.install(|| {
            let features = corpus_features(self.corpus, cfg, self.cache)?;
            Ok(cross_validate(&features, self.classifier, &self.cv)?)
        })
    }

    fn point(&self, name: String, axis: Option<SweepParameter>, value: Option<f64>, cfg: MfccConfig) -> SweepResult {
        let start = Instant::now();
        let mut warnings = Vec::new();
        if cfg.hop_length_ms > cfg.frame_length_ms {
            warnings.push(format!(
                "hop {} ms exceeds frame {} ms; signal between frames is not analysed",
                cfg.hop_length_ms, cfg.frame_length_ms
            ));
        }
        let (metrics, error) = match self.evaluate(&cfg) {
            Ok(mut m) => {
                warnings.append(&mut m.warnings);
                (Some(m), None)
            }
            Err(e) => (None, Some(e.to_string())),
        };
        if let Some(e) = &error {
            log::warn!("{}: grid point {name} failed: {e}", self.corpus.name);
        }
        SweepResult {
            dataset: self.corpus.name.clone(),
            name,
            axis,
            value,
            digest: cfg.digest(),
            grid_point: cfg,
            metrics,
            error,
            warnings,
            wall_time: start.elapsed().as_secs_f64(),
        }
    }

    fn run_points(&self, points: Vec<(String, Option<SweepParameter>, Option<f64>, MfccConfig)>) -> Vec<SweepResult> {
        self.pool.install(|| {
            points.into_par_iter().map(|(name, axis, value, cfg)| self.point(name, axis, value, cfg)).collect()
        })
    }

    /// One result per axis value, in axis order. Only the swept field differs
    /// from `base`; infeasible values become failed points.
    pub fn sweep_axis(&self, axis: &GridAxis, base: &MfccConfig) -> Result<Vec<SweepResult>, SweepError> {
        axis.validate().map_err(SweepError::Axis)?;
        let points = axis
            .values
            .iter()
            .map(|&v| {
                let name = format!("{}={v}", axis.parameter.name());
                (name, Some(axis.parameter), Some(v), axis.config_at(base, v))
            })
            .collect();
        Ok(self.run_points(points))
    }

    /// One result per combination, in the given order.
    pub fn run_combinations(&self, combos: &[NamedCombination], base: &MfccConfig) -> Vec<SweepResult> {
        let points = combos.iter().map(|c| (c.name.clone(), None, None, c.config(base))).collect();
        self.run_points(points)
    }
}

/// `target` against `baseline` on one metric, as an absolute difference and
/// relative to the baseline value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Improvement {
    pub dataset: String,
    pub target: String,
    pub baseline: String,
    pub metric: Metric,
    pub target_mean: f64,
    pub baseline_mean: f64,
    pub absolute: f64,
    pub relative: Option<f64>,
}

/// `None` if either point is missing or failed.
pub fn improvement(results: &[SweepResult], target: &str, baseline: &str, metric: Metric) -> Option<Improvement> {
    let find = |name: &str| results.iter().find(|r| r.name == name);
    let (t, b) = (find(target)?, find(baseline)?);
    let (tm, bm) = (t.mean(metric)?, b.mean(metric)?);
    Some(Improvement {
        dataset: t.dataset.clone(),
        target: target.to_string(),
        baseline: baseline.to_string(),
        metric,
        target_mean: tm,
        baseline_mean: bm,
        absolute: tm - bm,
        relative: (bm != 0.0).then(|| (tm - bm) / bm),
    })
}
