//! Seeded two-class demo corpus: source-filter vowels where the positive
//! class has raised formants, wider bandwidths, more aspiration noise and a
//! deeper amplitude tremor.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::report::write_atomic;
use super::HarnessError;
use crate::audio::{encode_wav_pcm16, AudioClip};
use crate::label::Label;

/// Dataset name, and manifest file stem, of the generated corpus.
pub const SYNTH_DATASET: &str = "synthetic";

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub clips: usize,
    pub seconds: f64,
    pub sample_rate: u32,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self { clips: 200, seconds: 3.0, sample_rate: 16_000, seed: 0 }
    }
}

/// F1..F4 in Hz for /a/, /i/, /u/, /e/ (adult male averages).
const VOWELS: [[f64; 4]; 4] = [
    [730.0, 1090.0, 2440.0, 3400.0],
    [270.0, 2290.0, 3010.0, 3700.0],
    [300.0, 870.0, 2240.0, 3300.0],
    [530.0, 1840.0, 2480.0, 3500.0],
];
const BANDWIDTHS: [f64; 4] = [80.0, 100.0, 140.0, 180.0];

/// Two-pole resonator with unit gain at DC.
struct Resonator {
    a1: f64,
    a2: f64,
    gain: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new(freq: f64, bandwidth: f64, rate: f64) -> Self {
        let mut r = Self { a1: 0.0, a2: 0.0, gain: 1.0, y1: 0.0, y2: 0.0 };
        r.tune(freq, bandwidth, rate);
        r
    }

    /// Move the resonance, keeping the filter state.
    fn tune(&mut self, freq: f64, bandwidth: f64, rate: f64) {
        let r = (-PI * bandwidth / rate).exp();
        let theta = 2.0 * PI * freq.min(0.45 * rate) / rate;
        self.a1 = 2.0 * r * theta.cos();
        self.a2 = -r * r;
        self.gain = 1.0 - self.a1 - self.a2;
    }

    fn step(&mut self, x: f64) -> f64 {
        let y = self.gain * x + self.a1 * self.y1 + self.a2 * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Samples between resonator retunes while the formants glide.
const RETUNE_EVERY: usize = 80;

/// A vowel gliding into a second one. Groups "F" and "M" differ in pitch and
/// vocal-tract length; the positive class has raised, wider resonances, more
/// aspiration noise and pitch jitter, and a deeper 8-14 Hz amplitude tremor.
pub fn synth_clip(label: Label, group: &str, spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let rate = spec.sample_rate as f64;
    let n = (spec.seconds * rate).round() as usize;
    let female = group == "F";
    let pathological = label.is_positive();

    let f0 = if female { rng.gen_range(160.0..290.0) } else { rng.gen_range(80.0..160.0) };
    let tract = if female { 1.15 } else { 1.0 } * rng.gen_range(0.95..1.05);
    let shift = if pathological { 1.14 } else { 1.0 };
    let widen = if pathological { 1.8 } else { 1.0 };
    let jitter = if pathological { 0.02 } else { 0.004 };
    let aspiration = if pathological { 0.3 } else { 0.03 };
    let tremor_depth = if pathological { rng.gen_range(0.6..0.9) } else { rng.gen_range(0.0..0.15) };

    let pick = |rng: &mut ChaCha8Rng| -> [f64; 4] {
        let v = VOWELS[rng.gen_range(0..VOWELS.len())];
        let mut out = [0.0; 4];
        for (o, f) in out.iter_mut().zip(v) {
            *o = f * tract * shift * rng.gen_range(0.96..1.04);
        }
        out
    };
    let (from, to) = (pick(rng), pick(rng));
    let bandwidths: Vec<f64> = BANDWIDTHS.iter().map(|b| b * widen * rng.gen_range(0.8..1.2)).collect();
    let mut tract_filter: Vec<Resonator> = (0..4).map(|i| Resonator::new(from[i], bandwidths[i], rate)).collect();

    let vibrato_rate = rng.gen_range(4.0..6.0);
    let tremor_rate = rng.gen_range(8.0..14.0);
    let (vib_phase, trem_phase) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));

    let mut phase = 0.0;
    let mut period_scale = 1.0;
    let mut prev_saw = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let time = t as f64 / rate;
        if t % RETUNE_EVERY == 0 {
            let x = t as f64 / n as f64;
            let glide = x * x * (3.0 - 2.0 * x);
            for (i, r) in tract_filter.iter_mut().enumerate() {
                r.tune(from[i] + (to[i] - from[i]) * glide, bandwidths[i], rate);
            }
        }
        let vibrato = 1.0 + 0.01 * (2.0 * PI * vibrato_rate * time + vib_phase).sin();
        phase += f0 * vibrato * period_scale / rate;
        if phase >= 1.0 {
            phase -= 1.0;
            let z: f64 = StandardNormal.sample(rng);
            period_scale = 1.0 + jitter * z;
        }
        // differentiated sawtooth: one sharp pulse per period
        let saw = 2.0 * phase - 1.0;
        let pulse = saw - prev_saw;
        prev_saw = saw;
        let tremor = 1.0 + tremor_depth * (2.0 * PI * tremor_rate * time + trem_phase).sin();
        let noise: f64 = StandardNormal.sample(rng);
        let mut y = tremor * (pulse + aspiration * 0.1 * noise);
        for r in tract_filter.iter_mut() {
            y = r.step(y);
        }
        out.push(y);
    }

    let rms = (out.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt().max(1e-12);
    let level = rng.gen_range(0.09..0.11) / rms;
    let hiss = rng.gen_range(2e-4..2e-3);
    for v in out.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *v = (*v * level + hiss * z).clamp(-1.0, 1.0);
    }
    out
}

/// Write `clips/<id>.wav` and `synthetic.csv` under `dir`; returns the
/// manifest path. Labels alternate in pairs and groups alternate, so both
/// groups hold both classes in equal numbers.
pub fn write_synthetic_corpus(dir: &Path, spec: &SynthSpec) -> Result<PathBuf, HarnessError> {
    let runtime = |e: std::io::Error| HarnessError::Runtime(format!("{}: {e}", dir.display()));
    let clip_dir = dir.join("clips");
    std::fs::create_dir_all(&clip_dir).map_err(runtime)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut manifest = String::from("id,path,label,group\n");
    for i in 0..spec.clips {
        let label = if (i / 2) % 2 == 0 { Label::Negative } else { Label::Positive };
        let group = if i % 2 == 0 { "F" } else { "M" };
        let id = format!("syn{i:04}");
        let samples = synth_clip(label, group, spec, &mut rng);
        let clip =
            AudioClip::new(samples, spec.sample_rate, id.clone()).map_err(|e| HarnessError::Runtime(e.to_string()))?;
        let rel = format!("clips/{id}.wav");
        write_atomic(&dir.join(&rel), &encode_wav_pcm16(&clip))?;
        manifest.push_str(&format!("{id},{rel},{label},{group}\n"));
    }
    let path = dir.join(format!("{SYNTH_DATASET}.csv"));
    write_atomic(&path, manifest.as_bytes())?;
    Ok(path)
}
