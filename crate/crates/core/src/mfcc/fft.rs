use std::f64::consts::PI;

use num_complex::Complex64;

use super::{FrameMatrix, MfccConfig, MfccError};

/// In-place iterative radix-2 decimation-in-time FFT of a fixed size.
///
/// Twiddles are evaluated directly from `cos`/`sin` per index rather than by
/// recurrence, which keeps the error at O(log K) ulps even for K = 16384.
#[derive(Debug, Clone)]
pub struct Radix2Fft {
    size: usize,
    twiddles: Vec<Complex64>,
    bit_reverse: Vec<usize>,
}

impl Radix2Fft {
    pub fn new(size: usize) -> Result<Self, MfccError> {
        if size == 0 || !size.is_power_of_two() {
            return Err(MfccError::FftLength(size));
        }
        let twiddles = (0..size / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / size as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        let bits = size.trailing_zeros();
        let bit_reverse =
            (0..size).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) }).collect();
        Ok(Self { size, twiddles, bit_reverse })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Forward transform, X(k) = sum_n x(n) exp(-2 pi i k n / K).
    pub fn process(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.size, "buffer length must equal FFT size");
        for (i, &j) in self.bit_reverse.iter().enumerate() {
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.size {
            let half = len / 2;
            let stride = self.size / len;
            for start in (0..self.size).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }

    /// |X(k)|^2 for k in 0..=K/2 of a real frame zero-padded to K.
    pub fn power_spectrum_into(&self, frame: &[f64], out: &mut [f64]) {
        assert!(frame.len() <= self.size, "frame longer than FFT");
        assert_eq!(out.len(), self.size / 2 + 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        buf.iter_mut().zip(frame).for_each(|(b, &x)| b.re = x);
        self.process(&mut buf);
        out.iter_mut().zip(&buf).for_each(|(o, x)| *o = x.norm_sqr());
    }
}

/// Power values A_k = |X(k)|^2 for k = 0..=K/2 of one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSpectrum(pub Vec<f64>);

/// Power spectrum of every (already windowed) frame, zero-padded to K.
pub fn power_spectrum(frames: &FrameMatrix, cfg: &MfccConfig) -> Result<Vec<PowerSpectrum>, MfccError> {
    let fft = Radix2Fft::new(cfg.fft_len())?;
    if frames.frame_len() > fft.size() {
        return Err(MfccError::DimensionMismatch { expected: fft.size(), got: frames.frame_len() });
    }
    Ok(frames
        .rows()
        .map(|row| {
            let mut out = vec![0.0; fft.size() / 2 + 1];
            fft.power_spectrum_into(row, &mut out);
            PowerSpectrum(out)
        })
        .collect())
}
