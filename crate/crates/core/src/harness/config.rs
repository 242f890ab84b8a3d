use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::audio::IngestConfig;
use crate::mfcc::MfccConfig;
use crate::svm::SvmParams;
use crate::sweep::{GridAxis, NamedCombination, SweepParameter};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub k: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { k: 10, seed: 0 }
    }
}

/// An axis to sweep; `values` defaults to the standard eight-point grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub parameter: SweepParameter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl AxisConfig {
    pub fn grid(&self) -> GridAxis {
        GridAxis {
            parameter: self.parameter,
            values: self.values.clone().unwrap_or_else(|| self.parameter.standard_values()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<AxisConfig>,
    pub combinations: Vec<NamedCombination>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axes: SweepParameter::ALL.iter().map(|&parameter| AxisConfig { parameter, values: None }).collect(),
            combinations: NamedCombination::presets(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    /// Used when no `--manifest` is given. Relative paths resolve against
    /// the config file's directory.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub manifests: Vec<PathBuf>,
    /// Used when no `--out` is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// The whole run configuration, one TOML section per table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub ingest: IngestConfig,
    pub mfcc: MfccConfig,
    pub svm: SvmParams,
    pub eval: EvalConfig,
    pub sweep: SweepConfig,
    pub io: IoConfig,
}

impl HarnessConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: HarnessConfig = toml::from_str(text).map_err(|e| HarnessError::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and validate; relative `io` paths are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)
            .map_err(|e| HarnessError::Validation(format!("{}: {}", path.display(), e.message())))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        for m in &mut cfg.io.manifests {
            if m.is_relative() {
                *m = dir.join(&*m);
            }
        }
        if let Some(out) = &mut cfg.io.out {
            if out.is_relative() {
                *out = dir.join(&*out);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |msg: String| Err(HarnessError::Validation(msg));
        if let Err(e) = self.ingest.validate() {
            return invalid(e.to_string());
        }
        if let Err(e) = self.mfcc.validate() {
            return invalid(e.to_string());
        }
        if self.mfcc.sample_rate != self.ingest.target_sample_rate {
            return invalid(format!(
                "mfcc.sample_rate ({}) must equal ingest.target_sample_rate ({})",
                self.mfcc.sample_rate, self.ingest.target_sample_rate
            ));
        }
        if let Err(e) = self.svm.validate() {
            return invalid(e);
        }
        if self.eval.k < 2 {
            return invalid(format!("eval.k must be at least 2, got {}", self.eval.k));
        }
        for axis in &self.sweep.axes {
            if let Err(e) = axis.grid().validate() {
                return invalid(format!("sweep.axes: {e}"));
            }
        }
        let mut names: Vec<&str> = self.sweep.combinations.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("sweep.combinations: duplicate name {:?}", w[0]));
        }
        if names.iter().any(|n| n.is_empty()) {
            return invalid("sweep.combinations: empty name".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_canonically() {
        let text = HarnessConfig::default().to_toml_string();
        let back = HarnessConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, HarnessConfig::default());
        assert_eq!(back.to_toml_string(), text);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg = HarnessConfig::from_toml_str(
            r#"
            [eval]
            seed = 7

            [mfcc]
            num_coefficients = 30

            [[sweep.axes]]
            parameter = "hop_length_ms"
            values = [5.0, 10.0]

            [[sweep.combinations]]
            name = "mine"
            frame_length_ms = 50.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.eval, EvalConfig { k: 10, seed: 7 });
        assert_eq!(cfg.mfcc.num_coefficients, 30);
        assert_eq!(cfg.sweep.axes.len(), 1);
        assert_eq!(cfg.sweep.axes[0].grid().values, vec![5.0, 10.0]);
        assert_eq!(cfg.sweep.combinations[0].config(&cfg.mfcc).frame_length_ms, 50.0);
        let again = HarnessConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in ["[mfcc]\nnum_coeficients = 3\n", "[svm]\nC = 2.0\n", "[evaluation]\nk = 3\n"] {
            let err = HarnessConfig::from_toml_str(text).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "[eval]\nk = 1\n",
            "[mfcc]\nnum_coefficients = 90\n",
            "[mfcc]\nsample_rate = 8000\n",
            "[svm]\nc = -1.0\n",
            "[[sweep.axes]]\nparameter = \"hop_length_ms\"\nvalues = [10.0, 5.0]\n",
            "[[sweep.combinations]]\nname = \"a\"\n[[sweep.combinations]]\nname = \"a\"\n",
        ] {
            assert!(HarnessConfig::from_toml_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn relative_io_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[io]\nmanifests = [\"data/a.csv\"]\nout = \"results\"\n").unwrap();
        let cfg = HarnessConfig::load(&path).unwrap();
        assert_eq!(cfg.io.manifests, vec![dir.path().join("data/a.csv")]);
        assert_eq!(cfg.io.out, Some(dir.path().join("results")));
    }
}
