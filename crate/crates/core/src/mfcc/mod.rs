//! MFCC extraction: framing, Hamming window, power spectrum, triangular mel
//! filterbank, log10 compression and the unscaled DCT, followed by mean
//! pooling over frames.

mod cepstrum;
mod fft;
mod filterbank;
mod frame;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::audio::Segment;
use crate::label::Label;

pub use cepstrum::{dct_coefficients, log_energies, DctMatrix, LOG_FLOOR};
pub use fft::{power_spectrum, PowerSpectrum, Radix2Fft};
pub use filterbank::{build_filterbank, filterbank_energies, hz_to_mel, mel_to_hz, MelFilterbank};
pub use frame::{apply_window, frame_signal, hamming_window, FrameMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MfccError {
    #[error("invalid MFCC configuration: {0}")]
    InvalidConfig(String),
    #[error("signal has {len} samples but one frame needs {frame_len}")]
    SignalTooShort { len: usize, frame_len: usize },
    #[error("mel filter {filter} has no FFT bin inside its support; use fewer filters or a longer FFT")]
    DegenerateFilter { filter: usize },
    #[error("FFT length {0} is not a power of two")]
    FftLength(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Every knob of the extraction pipeline. Times are in milliseconds and
/// frequencies in Hz; `fmax = None` means Nyquist.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfccConfig {
    pub num_coefficients: usize,
    pub frame_length_ms: f64,
    pub hop_length_ms: f64,
    pub num_filters: usize,
    pub sample_rate: u32,
    pub fmin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fmax: Option<f64>,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            num_coefficients: 13,
            frame_length_ms: 25.0,
            hop_length_ms: 10.0,
            num_filters: 80,
            sample_rate: 16_000,
            fmin: 0.0,
            fmax: None,
        }
    }
}

fn ms_to_samples(ms: f64, rate: u32) -> usize {
    (ms * rate as f64 / 1000.0).round() as usize
}

impl MfccConfig {
    /// Frame length N in samples.
    pub fn frame_len(&self) -> usize {
        ms_to_samples(self.frame_length_ms, self.sample_rate)
    }

    /// Hop length M in samples.
    pub fn hop_len(&self) -> usize {
        ms_to_samples(self.hop_length_ms, self.sample_rate)
    }

    /// FFT length K, the next power of two at or above N.
    pub fn fft_len(&self) -> usize {
        self.frame_len().max(1).next_power_of_two()
    }

    pub fn num_bins(&self) -> usize {
        self.fft_len() / 2 + 1
    }

    pub fn fmax_hz(&self) -> f64 {
        self.fmax.unwrap_or(self.sample_rate as f64 / 2.0)
    }

    pub fn validate(&self) -> Result<(), MfccError> {
        let bad = |msg: String| Err(MfccError::InvalidConfig(msg));
        if self.sample_rate == 0 {
            return bad("sample_rate must be positive".into());
        }
        if !(self.frame_length_ms.is_finite() && self.hop_length_ms.is_finite()) {
            return bad("frame and hop lengths must be finite".into());
        }
        if self.frame_len() < 1 {
            return bad(format!("frame length {} ms is shorter than one sample", self.frame_length_ms));
        }
        if self.hop_len() < 1 {
            return bad(format!("hop length {} ms is shorter than one sample", self.hop_length_ms));
        }
        if self.num_filters < 1 {
            return bad("num_filters must be at least 1".into());
        }
        if self.num_coefficients < 1 || self.num_coefficients > self.num_filters {
            return bad(format!(
                "num_coefficients must lie in 1..={} (num_filters), got {}",
                self.num_filters, self.num_coefficients
            ));
        }
        let nyquist = self.sample_rate as f64 / 2.0;
        let fmax = self.fmax_hz();
        if !(self.fmin >= 0.0 && self.fmin < fmax && fmax <= nyquist) {
            return bad(format!("need 0 <= fmin < fmax <= {nyquist} Hz, got fmin={} fmax={fmax}", self.fmin));
        }
        Ok(())
    }

    /// Hex SHA-256 over a canonical JSON rendering with `fmax` resolved, so
    /// `fmax = None` and an explicit Nyquist value share a digest.
    pub fn digest(&self) -> String {
        let mut resolved = self.clone();
        resolved.fmax = Some(self.fmax_hz());
        let canonical = serde_json::to_string(&resolved).expect("config serializes");
        let hash = Sha256::digest(canonical.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Frame-wise cepstral coefficients, one row of L values per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct MfccMatrix {
    num_coefficients: usize,
    data: Vec<f64>,
}

impl MfccMatrix {
    pub fn frame_count(&self) -> usize {
        self.data.len() / self.num_coefficients
    }

    pub fn num_coefficients(&self) -> usize {
        self.num_coefficients
    }

    pub fn row(&self, frame: usize) -> &[f64] {
        &self.data[frame * self.num_coefficients..(frame + 1) * self.num_coefficients]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.num_coefficients)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MfccError> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if width == 0 {
            return Err(MfccError::InvalidConfig("matrix needs at least one non-empty row".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != width) {
            return Err(MfccError::DimensionMismatch { expected: width, got: r.len() });
        }
        Ok(Self { num_coefficients: width, data: rows.concat() })
    }
}

/// Elementwise mean over frames.
pub fn mean_pool(m: &MfccMatrix) -> Vec<f64> {
    let frames = m.frame_count() as f64;
    let mut acc = vec![0.0; m.num_coefficients];
    for row in m.rows() {
        acc.iter_mut().zip(row).for_each(|(a, v)| *a += v);
    }
    acc.iter_mut().for_each(|a| *a /= frames);
    acc
}

/// One pooled MFCC vector per segment; the classifier input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub id: String,
    pub values: Vec<f64>,
    pub label: Option<Label>,
    pub group: Option<String>,
}

impl FeatureVector {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Self {
        Self { id: id.into(), values, label: None, group: None }
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_group(mut self, group: Option<String>) -> Self {
        self.group = group;
        self
    }
}

/// Precomputed pipeline for one configuration. Immutable once built and
/// shareable across threads.
#[derive(Debug, Clone)]
pub struct MfccExtractor {
    config: MfccConfig,
    window: Vec<f64>,
    fft: Radix2Fft,
    filterbank: MelFilterbank,
    dct: DctMatrix,
}

impl MfccExtractor {
    pub fn new(config: &MfccConfig) -> Result<Self, MfccError> {
        config.validate()?;
        Ok(Self {
            config: config.clone(),
            window: hamming_window(config.frame_len()),
            fft: Radix2Fft::new(config.fft_len())?,
            filterbank: build_filterbank(config)?,
            dct: DctMatrix::new(config.num_filters, config.num_coefficients),
        })
    }

    pub fn config(&self) -> &MfccConfig {
        &self.config
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    pub fn extract(&self, samples: &[f64]) -> Result<MfccMatrix, MfccError> {
        let n = self.config.frame_len();
        let m = self.config.hop_len();
        if samples.len() < n {
            return Err(MfccError::SignalTooShort { len: samples.len(), frame_len: n });
        }
        let frames = (samples.len() - n) / m + 1;
        let l = self.config.num_coefficients;
        let mut data = Vec::with_capacity(frames * l);
        let mut frame = vec![0.0; n];
        let mut power = vec![0.0; self.config.num_bins()];
        let mut energies = vec![0.0; self.config.num_filters];
        for i in 0..frames {
            let src = &samples[i * m..i * m + n];
            frame.iter_mut().zip(src.iter().zip(&self.window)).for_each(|(f, (s, w))| *f = s * w);
            self.fft.power_spectrum_into(&frame, &mut power);
            self.filterbank.apply_into(&power, &mut energies);
            energies.iter_mut().for_each(|e| *e = e.max(LOG_FLOOR).log10());
            data.extend(self.dct.apply(&energies));
        }
        Ok(MfccMatrix { num_coefficients: l, data })
    }

    pub fn pooled(&self, samples: &[f64]) -> Result<Vec<f64>, MfccError> {
        Ok(mean_pool(&self.extract(samples)?))
    }
}

/// The whole chain for one segment. Builds a fresh extractor; use
/// [`MfccExtractor`] directly when processing many segments.
pub fn extract_mfcc(seg: &Segment, cfg: &MfccConfig) -> Result<MfccMatrix, MfccError> {
    if seg.sample_rate != cfg.sample_rate {
        return Err(MfccError::InvalidConfig(format!(
            "segment is {} Hz but config expects {} Hz",
            seg.sample_rate, cfg.sample_rate
        )));
    }
    MfccExtractor::new(cfg)?.extract(&seg.samples)
}
