//! Audio ingest: decode, resample to the canonical rate, cut into fixed-length
//! segments and trim silence per segment.

mod resample;
mod segment;
mod wav;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use resample::resample;
pub use segment::{frame_levels_db, remove_silence, segment, silence_threshold_db};
pub use wav::{decode_wav, encode_wav_f32, encode_wav_pcm16, read_wav_file, write_wav_file};

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed WAV data: {0}")]
    Format(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedCodec(String),
    #[error("invalid audio: {0}")]
    InvalidAudio(String),
    #[error("invalid ingest configuration: {0}")]
    InvalidConfig(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Mono time-domain signal with amplitudes in [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
    source_id: String,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32, source_id: impl Into<String>) -> Result<Self, AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidAudio("sample rate must be positive".into()));
        }
        if let Some(pos) = samples.iter().position(|s| !s.is_finite() || s.abs() > 1.0) {
            return Err(AudioError::InvalidAudio(format!("sample {pos} = {} is outside [-1, 1]", samples[pos])));
        }
        Ok(Self { samples, sample_rate, source_id: source_id.into() })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// A contiguous window of a clip, the unit that gets classified.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub parent_id: String,
    pub index: usize,
}

impl Segment {
    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Stable identifier: `<parent>#<index>`.
    pub fn id(&self) -> String {
        format!("{}#{}", self.parent_id, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub target_sample_rate: u32,
    pub segment_seconds: f64,
    pub min_keep_seconds: f64,
    pub silence_frame_ms: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self { target_sample_rate: 16_000, segment_seconds: 3.0, min_keep_seconds: 1.0, silence_frame_ms: 25.0 }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<(), AudioError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.target_sample_rate == 0 {
            return Err(AudioError::InvalidConfig("target_sample_rate must be positive".into()));
        }
        if !positive(self.segment_seconds) {
            return Err(AudioError::InvalidConfig("segment_seconds must be positive".into()));
        }
        if !positive(self.min_keep_seconds) {
            return Err(AudioError::InvalidConfig("min_keep_seconds must be positive".into()));
        }
        if !positive(self.silence_frame_ms) {
            return Err(AudioError::InvalidConfig("silence_frame_ms must be positive".into()));
        }
        if self.min_keep_seconds > self.segment_seconds {
            return Err(AudioError::InvalidConfig("min_keep_seconds must not exceed segment_seconds".into()));
        }
        Ok(())
    }
}

/// Resample to the target rate, segment, then trim silence inside each segment.
/// Segments that end up shorter than `min_keep_seconds` are dropped.
pub fn preprocess(clip: &AudioClip, cfg: &IngestConfig) -> Result<Vec<Segment>, AudioError> {
    cfg.validate()?;
    let clip = resample(clip, cfg.target_sample_rate)?;
    Ok(segment(&clip, cfg).into_iter().filter_map(|seg| remove_silence(&seg, cfg)).collect())
}
