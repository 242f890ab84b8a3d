use std::f64::consts::PI;

use super::{AudioClip, AudioError};

/// Zero crossings of the interpolation kernel on each side of the centre,
/// counted at the lower of the two rates. 16 per side gives 32 taps per phase
/// when upsampling.
const ZERO_CROSSINGS: f64 = 16.0;
const KAISER_BETA: f64 = 8.0;
/// Above this many phases the polyphase table is not worth storing.
const MAX_TABLE_PHASES: u64 = 4096;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= half / k as f64;
        let t2 = term * term;
        sum += t2;
        if t2 < sum * 1e-17 {
            break;
        }
    }
    sum
}

struct Kernel {
    cutoff: f64,
    half_width: f64,
    taps: i64,
    i0_beta: f64,
}

impl Kernel {
    fn new(cutoff: f64) -> Self {
        let half_width = ZERO_CROSSINGS / cutoff;
        Self { cutoff, half_width, taps: half_width.ceil() as i64, i0_beta: bessel_i0(KAISER_BETA) }
    }

    fn eval(&self, x: f64) -> f64 {
        if x.abs() >= self.half_width {
            return 0.0;
        }
        let u = self.cutoff * x;
        let sinc = if u == 0.0 { 1.0 } else { (PI * u).sin() / (PI * u) };
        let r = x / self.half_width;
        let window = bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / self.i0_beta;
        self.cutoff * sinc * window
    }

    /// Normalised weights for input offsets `-(taps-1) ..= taps` around the
    /// sample preceding an output point at fractional position `frac`.
    fn weights(&self, frac: f64) -> Vec<f64> {
        let mut w: Vec<f64> = (-(self.taps - 1)..=self.taps).map(|j| self.eval(frac - j as f64)).collect();
        let sum: f64 = w.iter().sum();
        if sum != 0.0 {
            w.iter_mut().for_each(|v| *v /= sum);
        }
        w
    }
}

/// Band-limited rational resampling with a Kaiser-windowed sinc (beta 8).
///
/// The output has `round(len * target / source)` samples. The kernel cutoff
/// sits at the lower of the two Nyquist frequencies. Output is clamped to
/// [-1, 1] to keep the clip invariant under Gibbs overshoot.
pub fn resample(clip: &AudioClip, target_rate: u32) -> Result<AudioClip, AudioError> {
    if target_rate == 0 {
        return Err(AudioError::InvalidConfig("target sample rate must be positive".into()));
    }
    let source_rate = clip.sample_rate();
    if source_rate == target_rate {
        return Ok(clip.clone());
    }

    let g = gcd(source_rate as u64, target_rate as u64);
    let up = target_rate as u64 / g;
    let down = source_rate as u64 / g;
    let input = clip.samples();
    let in_len = input.len() as u64;
    let out_len = (in_len * up * 2 + down) / (2 * down);

    let kernel = Kernel::new((up as f64 / down as f64).min(1.0));
    let table: Option<Vec<Vec<f64>>> =
        (up <= MAX_TABLE_PHASES).then(|| (0..up).map(|p| kernel.weights(p as f64 / up as f64)).collect());

    let mut out = Vec::with_capacity(out_len as usize);
    for i in 0..out_len {
        let pos = i * down;
        let base = (pos / up) as i64;
        let phase = pos % up;
        let computed;
        let weights: &[f64] = match &table {
            Some(t) => &t[phase as usize],
            None => {
                computed = kernel.weights(phase as f64 / up as f64);
                &computed
            }
        };
        let first = base - (kernel.taps - 1);
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let n = first + k as i64;
            if n >= 0 && (n as u64) < in_len {
                acc += w * input[n as usize];
            }
        }
        out.push(acc.clamp(-1.0, 1.0));
    }
    AudioClip::new(out, target_rate, clip.source_id())
}
