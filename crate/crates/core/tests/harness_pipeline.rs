use std::path::Path;

use cepsweep::harness::{run, Command, RunOptions};

fn opts(config: Option<&Path>, manifest: Option<&Path>, out: Option<&Path>) -> RunOptions {
    RunOptions {
        manifests: manifest.map(|m| vec![m.to_path_buf()]).unwrap_or_default(),
        config: config.map(Path::to_path_buf),
        out: out.map(Path::to_path_buf),
        seed: None,
        jobs: 1,
        group: None,
    }
}

fn synth(dir: &Path, clips: usize) -> std::path::PathBuf {
    run(&Command::Synth { clips }, &opts(None, None, Some(dir))).unwrap();
    dir.join("synthetic.csv")
}

#[test]
fn config_file_drives_extraction() {
    let tmp = tempfile::tempdir().unwrap();
    synth(&tmp.path().join("data"), 12);
    let config = tmp.path().join("exp.toml");
    std::fs::write(
        &config,
        "[mfcc]\nnum_coefficients = 20\n\n[io]\nmanifests = [\"data/synthetic.csv\"]\nout = \"out\"\n",
    )
    .unwrap();
    let summary = run(&Command::Extract, &opts(Some(&config), None, None)).unwrap();
    let features = tmp.path().join("out/features_synthetic.csv");
    assert!(summary.files.contains(&features));
    let text = std::fs::read_to_string(&features).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..3], &["id", "label", "group"]);
    assert_eq!(header.len(), 3 + 20);
    assert_eq!(header.last(), Some(&"c19"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn preprocess_lists_every_segment() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 6);
    let out = tmp.path().join("out");
    run(&Command::Preprocess, &opts(None, Some(&manifest), Some(&out))).unwrap();
    let segments = std::fs::read_to_string(out.join("segments.csv")).unwrap();
    assert_eq!(segments.lines().count(), 1 + 6);
    assert!(out.join("preprocess.json").is_file());
}

#[test]
fn sweep_results_keep_grid_order() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("data"), 30);
    let config = tmp.path().join("small.toml");
    std::fs::write(
        &config,
        "[eval]\nk = 5\n\n[[sweep.axes]]\nparameter = \"num_coefficients\"\nvalues = [13.0, 30.0]\n\n\
         [[sweep.axes]]\nparameter = \"hop_length_ms\"\nvalues = [10.0, 200.0]\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    run(&Command::Sweep { axis: None }, &opts(Some(&config), Some(&manifest), Some(&out))).unwrap();
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    let names: Vec<&str> = doc["results"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, vec!["num_coefficients=13", "num_coefficients=30", "hop_length_ms=10", "hop_length_ms=200"]);
    assert_eq!(doc["k"], 5);
    assert!(out.join("series_synthetic_coefficients.csv").is_file());
    assert!(out.join("series_synthetic_hop.csv").is_file());
}
