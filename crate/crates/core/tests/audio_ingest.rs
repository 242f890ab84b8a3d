use std::f64::consts::PI;
use std::io::Cursor;

use cepsweep::audio::{
    decode_wav, encode_wav_f32, encode_wav_pcm16, preprocess, remove_silence, resample, segment, AudioClip,
    IngestConfig,
};
use cepsweep::mfcc::Radix2Fft;
use num_complex::Complex64;
use proptest::prelude::*;

fn wav_bytes<S: hound::Sample + Copy>(spec: hound::WavSpec, frames: &[S]) -> Vec<u8> {
    let mut cursor = Cursor::new(Vec::new());
    let mut writer = hound::WavWriter::new(&mut cursor, spec).unwrap();
    for &s in frames {
        writer.write_sample(s).unwrap();
    }
    writer.finalize().unwrap();
    cursor.into_inner()
}

fn spec(bits: u16, format: hound::SampleFormat, channels: u16) -> hound::WavSpec {
    hound::WavSpec { channels, sample_rate: 16_000, bits_per_sample: bits, sample_format: format }
}

fn tone(seconds: f64, dbfs: f64, rate: u32) -> Vec<f64> {
    let amp = 10f64.powf(dbfs / 20.0);
    let n = (seconds * rate as f64).round() as usize;
    (0..n).map(|i| amp * (2.0 * PI * 440.0 * i as f64 / rate as f64).sin()).collect()
}

#[test]
fn integer_pcm_is_scaled_by_full_scale() {
    let bytes = wav_bytes(spec(16, hound::SampleFormat::Int, 1), &[32_767i16, -32_768]);
    let clip = decode_wav(&bytes, "a").unwrap();
    assert_eq!(clip.samples(), &[32_767.0 / 32_768.0, -1.0]);

    let bytes = wav_bytes(spec(24, hound::SampleFormat::Int, 1), &[4_194_304i32, -8_388_608]);
    assert_eq!(decode_wav(&bytes, "b").unwrap().samples(), &[0.5, -1.0]);

    let bytes = wav_bytes(spec(32, hound::SampleFormat::Int, 1), &[i32::MIN, 1 << 30]);
    assert_eq!(decode_wav(&bytes, "c").unwrap().samples(), &[-1.0, 0.5]);

    let bytes = wav_bytes(spec(32, hound::SampleFormat::Float, 2), &[0.5f32, -0.5, 0.25, 0.75]);
    assert_eq!(decode_wav(&bytes, "d").unwrap().samples(), &[0.0, 0.5]);
}

#[test]
fn float_writer_round_trips() {
    let samples = vec![0.0, 0.5, -0.25, 1.0, -1.0];
    let clip = AudioClip::new(samples.clone(), 22_050, "f").unwrap();
    let back = decode_wav(&encode_wav_f32(&clip), "f").unwrap();
    assert_eq!(back.samples(), samples.as_slice());
    assert_eq!(back.sample_rate(), 22_050);
}

#[test]
fn garbage_is_a_format_error() {
    assert!(decode_wav(b"RIFF\x04\x00\x00\x00WAVE", "x").is_err());
    assert!(decode_wav(b"not a wav file at all", "x").is_err());
}

proptest! {
    #[test]
    fn pcm16_round_trip_is_bit_exact(ints in prop::collection::vec(any::<i16>(), 1..2000)) {
        let samples: Vec<f64> = ints.iter().map(|&v| v as f64 / 32_768.0).collect();
        let clip = AudioClip::new(samples, 16_000, "p").unwrap();
        let back = decode_wav(&encode_wav_pcm16(&clip), "p").unwrap();
        prop_assert_eq!(back.samples(), clip.samples());
    }

    #[test]
    fn trimming_a_constant_level_signal_is_idempotent(seconds in 1.0f64..3.0, dbfs in -60.0f64..-1.0) {
        let cfg = IngestConfig::default();
        let clip = AudioClip::new(tone(seconds, dbfs, 16_000), 16_000, "t").unwrap();
        let seg = segment(&clip, &cfg).remove(0);
        let once = remove_silence(&seg, &cfg).unwrap();
        let twice = remove_silence(&once, &cfg).unwrap();
        prop_assert_eq!(&once.samples, &twice.samples);
    }
}

#[test]
fn thirteen_second_clip_segments() {
    let clip = AudioClip::new(vec![0.1; 16_000 * 131 / 10], 16_000, "long").unwrap();
    let segs = segment(&clip, &IngestConfig::default());
    let lengths: Vec<usize> = segs.iter().map(|s| s.samples.len()).collect();
    assert_eq!(lengths, vec![48_000, 48_000, 48_000, 48_000, 17_600]);
    assert!(segs.iter().enumerate().all(|(i, s)| s.index == i && s.parent_id == "long"));
}

#[test]
fn resampled_tone_stays_clean() {
    // 2 s of 1 kHz at 48 kHz; analyse 16384 samples from the middle of the
    // 16 kHz output, where 1 kHz falls exactly on bin 1024
    let x: Vec<f64> = (0..96_000).map(|i| 0.5 * (2.0 * PI * 1000.0 * i as f64 / 48_000.0).sin()).collect();
    let clip = AudioClip::new(x, 48_000, "sine").unwrap();
    let out = resample(&clip, 16_000).unwrap();
    assert_eq!(out.len(), 32_000);
    let k = 16_384;
    let start = (out.len() - k) / 2;
    let mut buf: Vec<Complex64> = out.samples()[start..start + k]
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let hann = 0.5 - 0.5 * (2.0 * PI * n as f64 / k as f64).cos();
            Complex64::new(v * hann, 0.0)
        })
        .collect();
    Radix2Fft::new(k).unwrap().process(&mut buf);
    let power: Vec<f64> = buf[..=k / 2].iter().map(|c| c.norm_sqr()).collect();
    let peak_bin = (0..power.len()).max_by(|&a, &b| power[a].total_cmp(&power[b])).unwrap();
    assert_eq!(peak_bin, 1024);
    let spurious = power.iter().enumerate().filter(|(b, _)| b.abs_diff(1024) > 3).map(|(_, p)| *p).fold(0.0, f64::max);
    let down_db = 10.0 * (power[1024] / spurious).log10();
    assert!(down_db >= 40.0, "largest spurious component only {down_db:.1} dB down");
}

#[test]
fn loud_then_quiet_recording_keeps_the_loud_part() {
    // 2 s at -6 dBFS then 2 s at -80 dBFS: the first 3 s segment loses its
    // quiet second; the 1 s all-quiet remainder is uniform and survives as is
    let mut x = tone(2.0, -6.0, 16_000);
    x.extend(tone(2.0, -80.0, 16_000));
    let clip = AudioClip::new(x, 16_000, "lq").unwrap();
    let segs = preprocess(&clip, &IngestConfig::default()).unwrap();
    assert_eq!(segs.len(), 2);
    assert_eq!(segs[0].samples.len(), 32_000);
    let loud_rms = (segs[0].samples.iter().map(|v| v * v).sum::<f64>() / 32_000.0).sqrt();
    assert!((20.0 * loud_rms.log10() - (-6.0 - 10.0 * 2f64.log10())).abs() < 0.01);
    assert_eq!(segs[1].samples.len(), 16_000);
}

#[test]
fn short_trim_result_is_discarded() {
    let mut x = tone(0.8, -6.0, 16_000);
    x.extend(tone(0.4, -80.0, 16_000));
    let clip = AudioClip::new(x, 16_000, "s").unwrap();
    assert!(preprocess(&clip, &IngestConfig::default()).unwrap().is_empty());
}

#[test]
fn preprocessing_resamples_first() {
    let clip = AudioClip::new(tone(2.0, -12.0, 8_000), 8_000, "r").unwrap();
    let segs = preprocess(&clip, &IngestConfig::default()).unwrap();
    assert_eq!(segs.len(), 1);
    assert_eq!(segs[0].sample_rate, 16_000);
    // filter edge transients can cost a frame or two at either end
    let len = segs[0].samples.len();
    assert!(len.is_multiple_of(400) && (30_400..=32_000).contains(&len), "{len}");
}
