use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use super::config::HarnessConfig;
use super::corpus::{load_dataset, LoadedDataset};
use super::manifest::parse_manifest;
use super::report::{
    features_csv, folds_csv, results_csv, series_csv, summary_table, write_atomic, DatasetInfo, ResultsDocument,
};
use super::synth::{write_synthetic_corpus, SynthSpec};
use super::HarnessError;
use crate::classifier::Classifier;
use crate::eval::{CvSettings, Metric};
use crate::svm::SvmClassifier;
use crate::sweep::{
    corpus_features, improvement, Experiment, FeatureCache, GridAxis, Improvement, MfccOverrides, NamedCombination,
    SweepParameter, SweepResult,
};

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    /// Decode, segment and trim; list the resulting segments.
    Preprocess,
    /// Pooled MFCCs with the configured settings, one CSV per dataset.
    Extract,
    /// One-axis sweeps; all configured axes unless one is named.
    Sweep { axis: Option<SweepParameter> },
    /// The named combinations.
    Combos,
    /// Cross-validate the configured MFCC settings once.
    Evaluate,
    /// Write the seeded synthetic demo corpus.
    Synth { clips: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Preprocess => "preprocess",
            Command::Extract => "extract",
            Command::Sweep { .. } => "sweep",
            Command::Combos => "combos",
            Command::Evaluate => "evaluate",
            Command::Synth { .. } => "synth",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub manifests: Vec<PathBuf>,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    pub group: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    /// Human-readable summary for the terminal.
    pub report: String,
}

struct Run<'a> {
    cfg: HarnessConfig,
    out: PathBuf,
    seed: u64,
    opts: &'a RunOptions,
    files: Vec<PathBuf>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), HarnessError> {
        let path = self.out.join(name);
        write_atomic(&path, contents.as_bytes())?;
        self.files.push(path);
        Ok(())
    }

    fn datasets(&self) -> Result<Vec<LoadedDataset>, HarnessError> {
        let manifests = if self.opts.manifests.is_empty() { &self.cfg.io.manifests } else { &self.opts.manifests };
        if manifests.is_empty() {
            return Err(HarnessError::Validation(
                "no dataset given; pass --manifest or set io.manifests in the config".into(),
            ));
        }
        let mut names = HashSet::new();
        let mut loaded = Vec::new();
        for path in manifests {
            let manifest = parse_manifest(path)?;
            if !names.insert(manifest.name.clone()) {
                return Err(HarnessError::Validation(format!(
                    "two manifests share the dataset name {:?}; rename one file",
                    manifest.name
                )));
            }
            log::info!("loading {} ({} clips)", manifest.name, manifest.entries.len());
            let ds = load_dataset(manifest, &self.cfg.ingest)?;
            if let Some(g) = &self.opts.group {
                if !ds.corpus.items.iter().any(|it| it.group.as_deref() == Some(g.as_str())) {
                    return Err(HarnessError::Validation(format!(
                        "dataset {} has no segments in group {g:?}",
                        ds.corpus.name
                    )));
                }
            }
            loaded.push(ds);
        }
        Ok(loaded)
    }
}

fn dataset_info(ds: &LoadedDataset) -> DatasetInfo {
    DatasetInfo {
        name: ds.corpus.name.clone(),
        manifest: ds.manifest.source.display().to_string(),
        clips: ds.manifest.entries.len(),
        segments: ds.corpus.items.len(),
        dropped_clips: ds.dropped.clone(),
    }
}

pub fn run(cmd: &Command, opts: &RunOptions) -> Result<RunSummary, HarnessError> {
    let cfg = match &opts.config {
        Some(path) => HarnessConfig::load(path)?,
        None => HarnessConfig::default(),
    };
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.io.out.clone())
        .ok_or_else(|| HarnessError::Validation("no output directory; pass --out or set io.out".into()))?;
    let seed = opts.seed.unwrap_or(cfg.eval.seed);
    let mut run = Run { cfg, out, seed, opts, files: Vec::new() };
    let report = match cmd {
        Command::Synth { clips } => synth(&mut run, *clips)?,
        Command::Preprocess => preprocess(&mut run)?,
        Command::Extract => extract(&mut run)?,
        Command::Sweep { .. } | Command::Combos | Command::Evaluate => experiment(&mut run, cmd)?,
    };
    Ok(RunSummary { files: run.files, report })
}

fn synth(run: &mut Run, clips: usize) -> Result<String, HarnessError> {
    if clips < 2 {
        return Err(HarnessError::Validation("synth needs at least 2 clips".into()));
    }
    let spec =
        SynthSpec { clips, sample_rate: run.cfg.ingest.target_sample_rate, seed: run.seed, ..SynthSpec::default() };
    let manifest = write_synthetic_corpus(&run.out, &spec)?;
    run.files.push(manifest.clone());
    Ok(format!("wrote {clips} clips; manifest {}\n", manifest.display()))
}

#[derive(Serialize)]
struct PreprocessDocument<'a> {
    ingest: &'a crate::audio::IngestConfig,
    datasets: Vec<DatasetInfo>,
}

fn preprocess(run: &mut Run) -> Result<String, HarnessError> {
    let datasets = run.datasets()?;
    let mut csv = String::from("dataset,segment_id,clip_id,index,label,group,seconds\n");
    let mut report = String::new();
    for ds in &datasets {
        for it in &ds.corpus.items {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                ds.corpus.name,
                it.segment.id(),
                it.segment.parent_id,
                it.segment.index,
                it.label,
                it.group.as_deref().unwrap_or(""),
                it.segment.duration_seconds()
            );
        }
        let _ = writeln!(
            report,
            "{}: {} clips -> {} segments ({} clips dropped)",
            ds.corpus.name,
            ds.manifest.entries.len(),
            ds.corpus.items.len(),
            ds.dropped.len()
        );
    }
    run.write("segments.csv", &csv)?;
    let doc = PreprocessDocument { ingest: &run.cfg.ingest, datasets: datasets.iter().map(dataset_info).collect() };
    let json = serde_json::to_string_pretty(&doc).expect("serializes") + "\n";
    run.write("preprocess.json", &json)?;
    Ok(report)
}

fn extract(run: &mut Run) -> Result<String, HarnessError> {
    let datasets = run.datasets()?;
    let cfg = run.cfg.mfcc.clone();
    let mut report = String::new();
    for ds in &datasets {
        let cache = FeatureCache::new();
        let mut features =
            corpus_features(&ds.corpus, &cfg, &cache).map_err(|e| HarnessError::Validation(e.to_string()))?;
        if let Some(g) = &run.opts.group {
            features.retain(|f| f.group.as_deref() == Some(g.as_str()));
        }
        run.write(&format!("features_{}.csv", ds.corpus.name), &features_csv(&features))?;
        let _ =
            writeln!(report, "{}: {} vectors of {} coefficients", ds.corpus.name, features.len(), cfg.num_coefficients);
    }
    Ok(report)
}

fn axes_for(run: &Run, axis: Option<SweepParameter>) -> Vec<GridAxis> {
    match axis {
        Some(p) => vec![run
            .cfg
            .sweep
            .axes
            .iter()
            .find(|a| a.parameter == p)
            .map(|a| a.grid())
            .unwrap_or_else(|| GridAxis::standard(p))],
        None => run.cfg.sweep.axes.iter().map(|a| a.grid()).collect(),
    }
}

/// The first combination named "optimized" (or else the first one) against each other combination.
fn improvements(results: &[SweepResult], combos: &[NamedCombination]) -> Vec<Improvement> {
    let Some(target) = combos.iter().find(|c| c.name == "optimized").or(combos.first()) else {
        return Vec::new();
    };
    let mut datasets: Vec<&str> = Vec::new();
    for r in results {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }
    let mut out = Vec::new();
    for ds in datasets {
        let own: Vec<SweepResult> = results.iter().filter(|r| r.dataset == ds).cloned().collect();
        for baseline in combos.iter().filter(|c| c.name != target.name) {
            for m in Metric::ALL {
                out.extend(improvement(&own, &target.name, &baseline.name, m));
            }
        }
    }
    out
}

fn experiment(run: &mut Run, cmd: &Command) -> Result<String, HarnessError> {
    let datasets = run.datasets()?;
    let classifier = SvmClassifier::new(run.cfg.svm.clone());
    let cv = CvSettings { k: run.cfg.eval.k, seed: run.seed, group: run.opts.group.clone() };
    let evaluate_only = [NamedCombination { name: "configured".into(), overrides: MfccOverrides::default() }];
    let combos: &[NamedCombination] = match cmd {
        Command::Combos => &run.cfg.sweep.combinations,
        Command::Evaluate => &evaluate_only,
        _ => &[],
    };
    let mut results = Vec::new();
    let mut series = Vec::new();
    for ds in &datasets {
        let cache = FeatureCache::new();
        let exp = Experiment::new(&ds.corpus, &classifier, cv.clone(), &cache, run.opts.jobs)
            .map_err(|e| HarnessError::Runtime(e.to_string()))?;
        match cmd {
            Command::Sweep { axis } => {
                for grid in axes_for(run, *axis) {
                    let base = grid.parameter.standard_base(&run.cfg.mfcc);
                    log::info!("{}: sweeping {} over {:?}", ds.corpus.name, grid.parameter, grid.values);
                    let points = exp.sweep_axis(&grid, &base).map_err(|e| HarnessError::Validation(e.to_string()))?;
                    series.push((ds.corpus.name.clone(), grid.parameter, points.clone()));
                    results.extend(points);
                }
            }
            _ => {
                log::info!("{}: evaluating {} configurations", ds.corpus.name, combos.len());
                results.extend(exp.run_combinations(combos, &run.cfg.mfcc));
            }
        }
    }

    let fallback_axis = match cmd {
        Command::Evaluate => "evaluate",
        _ => "combination",
    };
    let improvements = improvements(&results, combos);
    let infos: Vec<DatasetInfo> = datasets.iter().map(dataset_info).collect();
    let doc = ResultsDocument {
        tool: "cepsweep",
        version: env!("CARGO_PKG_VERSION"),
        command: cmd.name(),
        seed: run.seed,
        k: run.cfg.eval.k,
        group: run.opts.group.as_deref(),
        classifier: classifier.name(),
        svm: &run.cfg.svm,
        ingest: &run.cfg.ingest,
        mfcc_defaults: &run.cfg.mfcc,
        environment: ResultsDocument::environment(),
        datasets: &infos,
        results: &results,
        improvements: &improvements,
    };
    let json = doc.to_json();
    let table = summary_table(&results, classifier.name(), &improvements);
    run.write("results.csv", &results_csv(&results, fallback_axis))?;
    run.write("folds.csv", &folds_csv(&results))?;
    run.write("results.json", &json)?;
    run.write("summary.txt", &table)?;
    for (dataset, parameter, points) in &series {
        run.write(&format!("series_{dataset}_{}.csv", parameter.short_name()), &series_csv(points))?;
    }

    let failed = results.iter().filter(|r| !r.succeeded()).count();
    if failed == results.len() {
        return Err(HarnessError::Runtime(format!(
            "all {failed} grid points failed; reasons are in {}",
            run.out.join("results.json").display()
        )));
    }
    if failed > 0 {
        log::warn!("{failed} of {} grid points failed", results.len());
    }
    Ok(table)
}
