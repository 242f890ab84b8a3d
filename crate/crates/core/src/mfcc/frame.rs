use std::f64::consts::PI;

use super::{MfccConfig, MfccError};

/// Row-major frames of N samples each.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameMatrix {
    frame_len: usize,
    data: Vec<f64>,
}

impl FrameMatrix {
    pub fn from_rows(frame_len: usize, rows: &[Vec<f64>]) -> Result<Self, MfccError> {
        if frame_len == 0 {
            return Err(MfccError::InvalidConfig("frame length must be positive".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != frame_len) {
            return Err(MfccError::DimensionMismatch { expected: frame_len, got: r.len() });
        }
        Ok(Self { frame_len, data: rows.concat() })
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn frame_count(&self) -> usize {
        self.data.len() / self.frame_len
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.frame_len..(i + 1) * self.frame_len]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.frame_len)
    }
}

/// Split into frames of N samples starting every M samples. The trailing
/// partial frame is discarded; M may exceed N (samples in the gaps are skipped).
pub fn frame_signal(samples: &[f64], cfg: &MfccConfig) -> Result<FrameMatrix, MfccError> {
    cfg.validate()?;
    let n = cfg.frame_len();
    let m = cfg.hop_len();
    if samples.len() < n {
        return Err(MfccError::SignalTooShort { len: samples.len(), frame_len: n });
    }
    let count = (samples.len() - n) / m + 1;
    let mut data = Vec::with_capacity(count * n);
    for i in 0..count {
        data.extend_from_slice(&samples[i * m..i * m + n]);
    }
    Ok(FrameMatrix { frame_len: n, data })
}

/// w(n) = 0.54 - 0.46 cos(2 pi n / (N - 1)). A one-sample window is [1.0].
pub fn hamming_window(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = (len - 1) as f64;
    (0..len).map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / denom).cos()).collect()
}

pub fn apply_window(mut frames: FrameMatrix) -> FrameMatrix {
    let window = hamming_window(frames.frame_len);
    for row in frames.data.chunks_exact_mut(window.len()) {
        row.iter_mut().zip(&window).for_each(|(s, w)| *s *= w);
    }
    frames
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(frame_ms: f64, hop_ms: f64) -> MfccConfig {
        MfccConfig { frame_length_ms: frame_ms, hop_length_ms: hop_ms, ..MfccConfig::default() }
    }

    #[test]
    fn one_second_default_framing() {
        let samples: Vec<f64> = (0..16_000).map(|i| i as f64).collect();
        let frames = frame_signal(&samples, &cfg(25.0, 10.0)).unwrap();
        assert_eq!(frames.frame_count(), (16_000 - 400) / 160 + 1);
        assert_eq!(frames.frame_count(), 98);
        assert_eq!(frames.row(3)[0], 480.0);
        assert_eq!(frames.row(97)[399], (97 * 160 + 399) as f64);
    }

    #[test]
    fn exactly_one_frame() {
        let frames = frame_signal(&vec![0.5; 400], &cfg(25.0, 10.0)).unwrap();
        assert_eq!(frames.frame_count(), 1);
        assert!(matches!(
            frame_signal(&vec![0.5; 399], &cfg(25.0, 10.0)),
            Err(MfccError::SignalTooShort { len: 399, frame_len: 400 })
        ));
    }

    #[test]
    fn hop_longer_than_frame_leaves_gaps() {
        let samples: Vec<f64> = (0..24_400).map(|i| i as f64).collect();
        let frames = frame_signal(&samples, &cfg(25.0, 500.0)).unwrap();
        // starts at 0, 8000, 16000, 24000
        assert_eq!(frames.frame_count(), 4);
        let starts: Vec<f64> = frames.rows().map(|r| r[0]).collect();
        assert_eq!(starts, vec![0.0, 8000.0, 16_000.0, 24_000.0]);
    }

    #[test]
    fn hamming_endpoints_and_centre() {
        for n in [2, 3, 400, 401] {
            let w = hamming_window(n);
            assert!((w[0] - 0.08).abs() < 1e-15);
            assert!((w[n - 1] - 0.08).abs() < 1e-12);
        }
        let w = hamming_window(401);
        assert!((w[200] - 1.0).abs() < 1e-15);
        assert_eq!(hamming_window(1), vec![1.0]);
    }

    #[test]
    fn windowing_ones_gives_the_window() {
        let frames = FrameMatrix::from_rows(400, &[vec![1.0; 400]]).unwrap();
        let windowed = apply_window(frames);
        let sum: f64 = windowed.row(0).iter().sum();
        // Exact sum: 0.54 N - 0.46 sum cos(2 pi n / (N-1)); the cosine sum over
        // n = 0..N-1 of a full period plus its duplicated endpoint equals 1.
        let expected = 0.54 * 400.0 - 0.46 * 1.0;
        assert!((sum - expected).abs() < 1e-9, "{sum} vs {expected}");
        assert!((sum - 216.0).abs() < 0.5);
        assert_eq!(windowed.row(0), hamming_window(400).as_slice());
    }
}
