use super::{MfccConfig, MfccError, PowerSpectrum};

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// J triangular filters over the K/2+1 FFT bins, peak-normalised to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MelFilterbank {
    num_bins: usize,
    weights: Vec<f64>,
    /// J+2 edge frequencies in Hz, equally spaced in mel.
    edges_hz: Vec<f64>,
    /// Half-open range of bins with non-zero weight, per filter.
    support: Vec<(usize, usize)>,
}

impl MelFilterbank {
    pub fn num_filters(&self) -> usize {
        self.support.len()
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn edges_hz(&self) -> &[f64] {
        &self.edges_hz
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.num_bins..(j + 1) * self.num_bins]
    }

    pub fn support(&self, j: usize) -> (usize, usize) {
        self.support[j]
    }

    /// E_j = sum_k phi_j(k) A_k, without dimension checks.
    pub(crate) fn apply_into(&self, power: &[f64], out: &mut [f64]) {
        for (j, e) in out.iter_mut().enumerate() {
            let (lo, hi) = self.support[j];
            let row = &self.row(j)[lo..hi];
            *e = row.iter().zip(&power[lo..hi]).map(|(w, a)| w * a).sum();
        }
    }
}

/// Triangular filters whose J peaks sit at equally spaced mel points between
/// mel(fmin) and mel(fmax). Filter j rises linearly from edge j to edge j+1
/// and falls to edge j+2, sampled at bin frequencies k * rate / K, then scaled
/// so its largest sampled weight is exactly 1.
pub fn build_filterbank(cfg: &MfccConfig) -> Result<MelFilterbank, MfccError> {
    cfg.validate()?;
    let j_count = cfg.num_filters;
    let k_len = cfg.fft_len();
    let num_bins = k_len / 2 + 1;
    let mel_lo = hz_to_mel(cfg.fmin);
    let mel_hi = hz_to_mel(cfg.fmax_hz());
    let step = (mel_hi - mel_lo) / (j_count + 1) as f64;
    let edges_hz: Vec<f64> = (0..j_count + 2).map(|i| mel_to_hz(mel_lo + step * i as f64)).collect();
    let bin_hz = |k: usize| k as f64 * cfg.sample_rate as f64 / k_len as f64;

    let mut weights = vec![0.0; j_count * num_bins];
    let mut support = Vec::with_capacity(j_count);
    for j in 0..j_count {
        let (lo, centre, hi) = (edges_hz[j], edges_hz[j + 1], edges_hz[j + 2]);
        let row = &mut weights[j * num_bins..(j + 1) * num_bins];
        for (k, w) in row.iter_mut().enumerate() {
            let f = bin_hz(k);
            *w = if f > lo && f <= centre {
                (f - lo) / (centre - lo)
            } else if f > centre && f < hi {
                (hi - f) / (hi - centre)
            } else {
                0.0
            };
        }
        let peak = row.iter().copied().fold(0.0, f64::max);
        if peak <= 0.0 {
            return Err(MfccError::DegenerateFilter { filter: j });
        }
        row.iter_mut().for_each(|w| *w /= peak);
        let first = row.iter().position(|&w| w > 0.0).unwrap_or(0);
        let last = row.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        support.push((first, last + 1));
    }
    Ok(MelFilterbank { num_bins, weights, edges_hz, support })
}

pub fn filterbank_energies(spec: &PowerSpectrum, fb: &MelFilterbank) -> Result<Vec<f64>, MfccError> {
    if spec.0.len() != fb.num_bins {
        return Err(MfccError::DimensionMismatch { expected: fb.num_bins, got: spec.0.len() });
    }
    let mut out = vec![0.0; fb.num_filters()];
    fb.apply_into(&spec.0, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(frame_ms: f64, filters: usize) -> MfccConfig {
        MfccConfig { frame_length_ms: frame_ms, num_filters: filters, num_coefficients: 1, ..MfccConfig::default() }
    }

    #[test]
    fn mel_scale_values() {
        assert_eq!(hz_to_mel(0.0), 0.0);
        assert!((hz_to_mel(700.0) - 781.172_838_748_031_2).abs() < 1e-9);
        for hz in [0.0, 100.0, 1000.0, 7999.0] {
            assert!((mel_to_hz(hz_to_mel(hz)) - hz).abs() < 1e-9);
        }
    }

    #[test]
    fn two_filter_construction() {
        // 32 ms @ 16 kHz -> N = 512, K = 512
        let fb = build_filterbank(&cfg(32.0, 2)).unwrap();
        assert_eq!(fb.num_bins(), 257);
        let mel_max = hz_to_mel(8000.0);
        let edges_mel: Vec<f64> = fb.edges_hz().iter().map(|&f| hz_to_mel(f)).collect();
        assert_eq!(edges_mel.len(), 4);
        for (i, m) in edges_mel.iter().enumerate() {
            assert!((m - mel_max * i as f64 / 3.0).abs() < 1e-9);
        }
        for j in 0..2 {
            let row = fb.row(j);
            let peak_bin = row.iter().position(|&w| w == 1.0).unwrap();
            let peak_hz = peak_bin as f64 * 16_000.0 / 512.0;
            // the sampled peak is the bin nearest the interior edge point
            assert!((peak_hz - fb.edges_hz()[j + 1]).abs() <= 31.25);
        }
    }

    #[test]
    fn rows_peak_at_one_and_are_unimodal_across_grid() {
        for frame_ms in [25.0, 50.0, 100.0, 200.0, 300.0, 400.0, 500.0, 800.0] {
            let fb = build_filterbank(&cfg(frame_ms, 80)).unwrap();
            for j in 0..fb.num_filters() {
                let row = fb.row(j);
                assert!(row.iter().all(|&w| w >= 0.0));
                assert_eq!(row.iter().copied().fold(0.0, f64::max), 1.0);
                let peak = row.iter().position(|&w| w == 1.0).unwrap();
                assert!(row[..=peak].windows(2).all(|p| p[0] <= p[1]), "rise {frame_ms} {j}");
                assert!(row[peak..].windows(2).all(|p| p[0] >= p[1]), "fall {frame_ms} {j}");
            }
            for j in 1..fb.num_filters() {
                // triangles overlap on (edge j, edge j+1); sampled supports leave no gap
                assert!(fb.edges_hz()[j] < fb.edges_hz()[j + 1]);
                let (_, prev_hi) = fb.support(j - 1);
                let (lo, _) = fb.support(j);
                assert!(lo <= prev_hi, "gap between filters {} and {j}", j - 1);
            }
            let (first, _) = fb.support(0);
            let (_, last) = fb.support(fb.num_filters() - 1);
            assert!(first <= 1 && last >= fb.num_bins() - 2);
        }
    }

    #[test]
    fn too_many_filters_is_degenerate() {
        // 25 ms -> K = 512, 31.25 Hz bins; 200 filters leave the lowest ones empty
        let err = build_filterbank(&MfccConfig { num_filters: 200, ..cfg(25.0, 200) }).unwrap_err();
        assert!(matches!(err, MfccError::DegenerateFilter { .. }));
    }

    #[test]
    fn energies_examples() {
        let fb = build_filterbank(&cfg(25.0, 80)).unwrap();
        let zeros = PowerSpectrum(vec![0.0; fb.num_bins()]);
        assert!(filterbank_energies(&zeros, &fb).unwrap().iter().all(|&e| e == 0.0));

        let ones = PowerSpectrum(vec![1.0; fb.num_bins()]);
        let e = filterbank_energies(&ones, &fb).unwrap();
        for (j, e_j) in e.iter().enumerate() {
            let row_sum: f64 = fb.row(j).iter().sum();
            assert!((e_j - row_sum).abs() < 1e-12);
        }

        let j = 37;
        let peak = fb.row(j).iter().position(|&w| w == 1.0).unwrap();
        let mut tone = vec![0.0; fb.num_bins()];
        tone[peak] = 42.5;
        let e = filterbank_energies(&PowerSpectrum(tone), &fb).unwrap();
        assert_eq!(e[j], 42.5);

        let wrong = PowerSpectrum(vec![0.0; 10]);
        assert!(filterbank_energies(&wrong, &fb).is_err());
    }
}
