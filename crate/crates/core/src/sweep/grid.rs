use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mfcc::MfccConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    NumCoefficients,
    FrameLengthMs,
    HopLengthMs,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 3] =
        [SweepParameter::NumCoefficients, SweepParameter::FrameLengthMs, SweepParameter::HopLengthMs];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::NumCoefficients => "num_coefficients",
            SweepParameter::FrameLengthMs => "frame_length_ms",
            SweepParameter::HopLengthMs => "hop_length_ms",
        }
    }

    /// Short name used for file names and the `--axis` flag.
    pub fn short_name(self) -> &'static str {
        match self {
            SweepParameter::NumCoefficients => "coefficients",
            SweepParameter::FrameLengthMs => "frame",
            SweepParameter::HopLengthMs => "hop",
        }
    }

    pub fn get(self, cfg: &MfccConfig) -> f64 {
        match self {
            SweepParameter::NumCoefficients => cfg.num_coefficients as f64,
            SweepParameter::FrameLengthMs => cfg.frame_length_ms,
            SweepParameter::HopLengthMs => cfg.hop_length_ms,
        }
    }

    pub fn set(self, cfg: &mut MfccConfig, value: f64) {
        match self {
            SweepParameter::NumCoefficients => cfg.num_coefficients = value as usize,
            SweepParameter::FrameLengthMs => cfg.frame_length_ms = value,
            SweepParameter::HopLengthMs => cfg.hop_length_ms = value,
        }
    }

    /// The grid swept in the original experiments.
    pub fn standard_values(self) -> Vec<f64> {
        match self {
            SweepParameter::NumCoefficients => vec![13.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0],
            SweepParameter::FrameLengthMs => vec![25.0, 50.0, 100.0, 200.0, 300.0, 400.0, 500.0, 800.0],
            SweepParameter::HopLengthMs => vec![5.0, 25.0, 50.0, 100.0, 200.0, 300.0, 400.0, 500.0],
        }
    }

    /// Settings held constant while this parameter is swept: coefficients at
    /// 25 ms / 10 ms, frame length at 10 ms hop with 30 coefficients, hop at
    /// 25 ms frames with 30 coefficients. Other fields come from `defaults`.
    pub fn standard_base(self, defaults: &MfccConfig) -> MfccConfig {
        let mut cfg = defaults.clone();
        match self {
            SweepParameter::NumCoefficients => {
                cfg.frame_length_ms = 25.0;
                cfg.hop_length_ms = 10.0;
            }
            SweepParameter::FrameLengthMs => {
                cfg.hop_length_ms = 10.0;
                cfg.num_coefficients = 30;
            }
            SweepParameter::HopLengthMs => {
                cfg.frame_length_ms = 25.0;
                cfg.num_coefficients = 30;
            }
        }
        cfg
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "num_coefficients" | "coefficients" | "coeffs" | "L" => Ok(SweepParameter::NumCoefficients),
            "frame_length_ms" | "frame" => Ok(SweepParameter::FrameLengthMs),
            "hop_length_ms" | "hop" => Ok(SweepParameter::HopLengthMs),
            other => Err(format!("unknown sweep axis {other:?}; expected coefficients, frame or hop")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl GridAxis {
    pub fn new(parameter: SweepParameter, values: Vec<f64>) -> Result<Self, String> {
        let axis = Self { parameter, values };
        axis.validate()?;
        Ok(axis)
    }

    pub fn standard(parameter: SweepParameter) -> Self {
        Self { parameter, values: parameter.standard_values() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.values.is_empty() {
            return Err(format!("{} axis has no values", self.parameter));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(format!("{} axis values must be positive and finite", self.parameter));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(format!("{} axis values must be strictly increasing", self.parameter));
        }
        if self.parameter == SweepParameter::NumCoefficients && self.values.iter().any(|v| v.fract() != 0.0) {
            return Err("num_coefficients axis values must be whole numbers".into());
        }
        Ok(())
    }

    /// `base` with the swept field replaced by `value`.
    pub fn config_at(&self, base: &MfccConfig, value: f64) -> MfccConfig {
        let mut cfg = base.clone();
        self.parameter.set(&mut cfg, value);
        cfg
    }
}

/// Partial MFCC settings layered over a base configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfccOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_coefficients: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_length_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hop_length_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_filters: Option<usize>,
}

impl MfccOverrides {
    pub fn apply(&self, base: &MfccConfig) -> MfccConfig {
        let mut cfg = base.clone();
        if let Some(v) = self.num_coefficients {
            cfg.num_coefficients = v;
        }
        if let Some(v) = self.frame_length_ms {
            cfg.frame_length_ms = v;
        }
        if let Some(v) = self.hop_length_ms {
            cfg.hop_length_ms = v;
        }
        if let Some(v) = self.num_filters {
            cfg.num_filters = v;
        }
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedCombination {
    pub name: String,
    #[serde(flatten)]
    pub overrides: MfccOverrides,
}

impl NamedCombination {
    pub fn new(name: impl Into<String>, frame_ms: f64, hop_ms: f64, coefficients: usize) -> Self {
        Self {
            name: name.into(),
            overrides: MfccOverrides {
                num_coefficients: Some(coefficients),
                frame_length_ms: Some(frame_ms),
                hop_length_ms: Some(hop_ms),
                num_filters: None,
            },
        }
    }

    /// Best setting found by the one-axis sweeps: 25 ms frames, 5 ms hop, 30 coefficients.
    pub fn optimized() -> Self {
        Self::new("optimized", 25.0, 5.0, 30)
    }

    /// Common library defaults: 25 ms frames, 10 ms hop, 13 coefficients.
    pub fn default_preset() -> Self {
        Self::new("default", 25.0, 10.0, 13)
    }

    /// Worst setting from the sweeps: 800 ms frames, 500 ms hop, 80 coefficients.
    pub fn worst() -> Self {
        Self::new("worst", 800.0, 500.0, 80)
    }

    pub fn presets() -> Vec<Self> {
        vec![Self::optimized(), Self::default_preset(), Self::worst()]
    }

    pub fn config(&self, base: &MfccConfig) -> MfccConfig {
        self.overrides.apply(base)
    }
}
