use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::HarnessError;
use crate::audio::IngestConfig;
use crate::eval::Metric;
use crate::mfcc::{FeatureVector, MfccConfig};
use crate::svm::SvmParams;
use crate::sweep::{Improvement, SweepResult};

/// Write through a temporary sibling and rename, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let runtime = |e: std::io::Error| HarnessError::Runtime(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(runtime)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    std::fs::write(&tmp, bytes).map_err(runtime)?;
    std::fs::rename(&tmp, path).map_err(runtime)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn axis_columns(r: &SweepResult, fallback_axis: &str) -> (String, String, String) {
    match (r.axis, r.value) {
        (Some(axis), Some(v)) => (axis.short_name().into(), axis.name().into(), v.to_string()),
        _ => (fallback_axis.into(), r.name.clone(), String::new()),
    }
}

/// `dataset,axis,param,value,metric,mean,std`, one row per grid point and
/// metric. Points that are not axis values (combinations, single
/// evaluations) put `fallback_axis` in the axis column and their name in
/// `param`. Failed points keep their rows with empty mean and std.
pub fn results_csv(results: &[SweepResult], fallback_axis: &str) -> String {
    let mut out = String::from("dataset,axis,param,value,metric,mean,std\n");
    for r in results {
        let (axis, param, value) = axis_columns(r, fallback_axis);
        for m in Metric::ALL {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(&r.dataset),
                axis,
                csv_field(&param),
                value,
                m.name(),
                opt(r.mean(m)),
                opt(r.std(m))
            );
        }
    }
    out
}

/// `dataset,grid_point,fold,metric,value`; a metric missing on a fold has an empty value.
pub fn folds_csv(results: &[SweepResult]) -> String {
    let mut out = String::from("dataset,grid_point,fold,metric,value\n");
    for r in results {
        let Some(metrics) = &r.metrics else { continue };
        for fold in &metrics.folds {
            for m in Metric::ALL {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    csv_field(&r.dataset),
                    csv_field(&r.name),
                    fold.fold,
                    m.name(),
                    opt(m.fold_value(fold))
                );
            }
        }
    }
    out
}

/// `x,y,yerr` for a plotting tool: parameter value, mean accuracy, its std.
/// Failed points are left out rather than written as zeros.
pub fn series_csv(results: &[SweepResult]) -> String {
    let mut out = String::from("x,y,yerr\n");
    for r in results {
        if let (Some(x), Some(y), Some(e)) = (r.value, r.mean(Metric::Accuracy), r.std(Metric::Accuracy)) {
            let _ = writeln!(out, "{x},{y},{e}");
        }
    }
    out
}

/// `id,label[,group],c0,c1,...`
pub fn features_csv(features: &[FeatureVector]) -> String {
    let with_group = features.iter().any(|f| f.group.is_some());
    let dim = features.first().map_or(0, |f| f.values.len());
    let mut out = String::from("id,label");
    if with_group {
        out.push_str(",group");
    }
    for c in 0..dim {
        let _ = write!(out, ",c{c}");
    }
    out.push('\n');
    for f in features {
        out.push_str(&csv_field(&f.id));
        out.push(',');
        out.push_str(&f.label.map(|l| l.to_string()).unwrap_or_default());
        if with_group {
            out.push(',');
            out.push_str(&csv_field(f.group.as_deref().unwrap_or("")));
        }
        for v in &f.values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

fn cell(r: &SweepResult, m: Metric) -> String {
    match (r.mean(m), r.std(m)) {
        (Some(mean), Some(std)) => format!("{mean:.3} ± {std:.3}"),
        _ => "n/a".into(),
    }
}

/// Plain-text table with one row per grid point and Accuracy, AUC, F1,
/// Precision and EER columns (mean ± std over folds) for the given model,
/// grouped by dataset, followed by the improvement lines.
pub fn summary_table(results: &[SweepResult], model: &str, improvements: &[Improvement]) -> String {
    const COLS: [(&str, Metric); 5] = [
        ("Accuracy", Metric::Accuracy),
        ("AUC", Metric::Auc),
        ("F1", Metric::F1),
        ("Precision", Metric::Precision),
        ("EER", Metric::Eer),
    ];
    let name_width = results.iter().map(|r| r.name.len()).max().unwrap_or(0).max(11);
    let col_width = 15;
    let mut out = String::new();
    let mut datasets: Vec<&str> = Vec::new();
    for r in results {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }
    for dataset in datasets {
        let _ = writeln!(out, "Dataset: {dataset}    Model: {model}    (mean ± std over folds)");
        let _ = write!(out, "{:<name_width$}", "Combination");
        for (title, _) in COLS {
            let _ = write!(out, "  {title:>col_width$}");
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat(name_width + COLS.len() * (col_width + 2)));
        for r in results.iter().filter(|r| r.dataset == dataset) {
            let _ = write!(out, "{:<name_width$}", r.name);
            for (_, m) in COLS {
                let _ = write!(out, "  {:>col_width$}", cell(r, m));
            }
            out.push('\n');
            if let Some(e) = &r.error {
                let _ = writeln!(out, "    failed: {e}");
            }
        }
        for imp in improvements.iter().filter(|i| i.dataset == dataset && i.metric == Metric::Accuracy) {
            let relative = imp.relative.map(|r| format!("{:+.2}%", r * 100.0)).unwrap_or_else(|| "n/a".into());
            let _ = writeln!(
                out,
                "{} vs {}: accuracy {:+.2} points ({relative} relative)",
                imp.target,
                imp.baseline,
                imp.absolute * 100.0
            );
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub name: String,
    pub manifest: String,
    pub clips: usize,
    pub segments: usize,
    pub dropped_clips: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub os: &'static str,
    pub arch: &'static str,
}

/// Everything needed to interpret or rerun a set of results. Nothing
/// time- or host-load-dependent goes in, so reruns are byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct ResultsDocument<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub k: usize,
    pub group: Option<&'a str>,
    pub classifier: &'a str,
    pub svm: &'a SvmParams,
    pub ingest: &'a IngestConfig,
    pub mfcc_defaults: &'a MfccConfig,
    pub environment: Environment,
    pub datasets: &'a [DatasetInfo],
    pub results: &'a [SweepResult],
    pub improvements: &'a [Improvement],
}

impl ResultsDocument<'_> {
    pub fn environment() -> Environment {
        Environment { os: std::env::consts::OS, arch: std::env::consts::ARCH }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results serialize");
        s.push('\n');
        s
    }
}
