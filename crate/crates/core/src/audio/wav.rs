use std::io::Cursor;
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::{AudioClip, AudioError};

fn map_hound(err: hound::Error) -> AudioError {
    match err {
        // Input is always an in-memory buffer, so an I/O failure means the
        // declared chunk sizes ran past the end of the data.
        hound::Error::IoError(e) => AudioError::Format(format!("truncated or unreadable data: {e}")),
        hound::Error::FormatError(msg) => AudioError::Format(msg.to_string()),
        hound::Error::Unsupported => AudioError::UnsupportedCodec("compressed or unknown format tag".into()),
        hound::Error::TooWide => AudioError::UnsupportedCodec("sample width too large".into()),
        hound::Error::UnfinishedSample => AudioError::Format("data chunk ends mid-sample".into()),
        hound::Error::InvalidSampleFormat => AudioError::Format("invalid sample format".into()),
    }
}

/// Decode a RIFF/WAVE byte buffer into a mono clip.
///
/// Accepts 16/24/32-bit integer PCM and 32-bit float, one or two channels.
/// Integer samples are divided by full scale (2^(bits-1)); stereo is averaged.
pub fn decode_wav(bytes: &[u8], source_id: &str) -> Result<AudioClip, AudioError> {
    let reader = WavReader::new(Cursor::new(bytes)).map_err(map_hound)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if !(1..=2).contains(&channels) {
        return Err(AudioError::UnsupportedCodec(format!("{channels} channels")));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = (1u64 << (bits - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<Result<_, _>>()
                .map_err(map_hound)?
        }
        (SampleFormat::Float, 32) => {
            let raw: Vec<f32> = reader.into_samples::<f32>().collect::<Result<_, _>>().map_err(map_hound)?;
            if raw.iter().any(|s| !s.is_finite()) {
                return Err(AudioError::InvalidAudio("non-finite float sample".into()));
            }
            raw.into_iter().map(|v| (v as f64).clamp(-1.0, 1.0)).collect()
        }
        (format, bits) => return Err(AudioError::UnsupportedCodec(format!("{format:?} with {bits} bits per sample"))),
    };

    if !interleaved.len().is_multiple_of(channels) {
        return Err(AudioError::Format("data chunk ends mid-frame".into()));
    }
    let samples = if channels == 1 {
        interleaved
    } else {
        interleaved.chunks_exact(channels).map(|frame| frame.iter().sum::<f64>() / channels as f64).collect()
    };
    AudioClip::new(samples, spec.sample_rate, source_id)
}

pub fn read_wav_file(path: &Path) -> Result<AudioClip, AudioError> {
    let bytes = std::fs::read(path).map_err(|source| AudioError::Io { path: path.display().to_string(), source })?;
    decode_wav(&bytes, &path.display().to_string())
}

/// 16-bit mono PCM. Samples are scaled by 32768 and rounded, so any signal made
/// of `k / 32768` values survives a decode round trip bit-exact.
pub fn encode_wav_pcm16(clip: &AudioClip) -> Vec<u8> {
    let spec =
        WavSpec { channels: 1, sample_rate: clip.sample_rate(), bits_per_sample: 16, sample_format: SampleFormat::Int };
    write_with(spec, |w| {
        for &s in clip.samples() {
            let q = (s * 32768.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
            w.write_sample(q)?;
        }
        Ok(())
    })
}

/// 32-bit float mono; lossless for preprocessed artifacts.
pub fn encode_wav_f32(clip: &AudioClip) -> Vec<u8> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    write_with(spec, |w| {
        for &s in clip.samples() {
            w.write_sample(s as f32)?;
        }
        Ok(())
    })
}

fn write_with<F>(spec: WavSpec, body: F) -> Vec<u8>
where
    F: FnOnce(&mut WavWriter<&mut Cursor<Vec<u8>>>) -> Result<(), hound::Error>,
{
    let mut cursor = Cursor::new(Vec::new());
    {
        // Writing into a Vec cannot fail short of allocation failure.
        let mut writer = WavWriter::new(&mut cursor, spec).expect("in-memory WAV header");
        body(&mut writer).expect("in-memory WAV write");
        writer.finalize().expect("in-memory WAV finalize");
    }
    cursor.into_inner()
}

pub fn write_wav_file(path: &Path, bytes: &[u8]) -> Result<(), AudioError> {
    std::fs::write(path, bytes).map_err(|source| AudioError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wav_bytes<S: hound::Sample + Copy>(spec: WavSpec, samples: &[S]) -> Vec<u8> {
        write_with(spec, |w| {
            for &s in samples {
                w.write_sample(s)?;
            }
            Ok(())
        })
    }

    fn int_spec(channels: u16, bits: u16) -> WavSpec {
        WavSpec { channels, sample_rate: 16_000, bits_per_sample: bits, sample_format: SampleFormat::Int }
    }

    #[test]
    fn pcm16_full_scale_division() {
        let bytes = wav_bytes(int_spec(1, 16), &[32767i16, -32768]);
        let clip = decode_wav(&bytes, "t").unwrap();
        assert_eq!(clip.samples(), &[32767.0 / 32768.0, -1.0]);
        assert!((clip.samples()[0] - 0.99997).abs() < 1e-5);
        assert_eq!(clip.sample_rate(), 16_000);
    }

    #[test]
    fn pcm24_and_pcm32_scaling() {
        let bytes = wav_bytes(int_spec(1, 24), &[1i32 << 22, -(1 << 23)]);
        assert_eq!(decode_wav(&bytes, "t").unwrap().samples(), &[0.5, -1.0]);
        let bytes = wav_bytes(int_spec(1, 32), &[1i32 << 29, i32::MIN]);
        assert_eq!(decode_wav(&bytes, "t").unwrap().samples(), &[0.25, -1.0]);
    }

    #[test]
    fn stereo_is_averaged() {
        let spec = WavSpec { channels: 2, sample_rate: 8_000, bits_per_sample: 32, sample_format: SampleFormat::Float };
        let bytes = wav_bytes(spec, &[0.5f32, -0.5, 0.25, 0.75]);
        let clip = decode_wav(&bytes, "t").unwrap();
        assert_eq!(clip.samples(), &[0.0, 0.5]);
    }

    #[test]
    fn truncated_data_chunk_is_format_error() {
        let bytes = wav_bytes(int_spec(1, 16), &[1i16; 64]);
        let cut = &bytes[..bytes.len() - 21];
        assert!(matches!(decode_wav(cut, "t"), Err(AudioError::Format(_))));
        assert!(matches!(decode_wav(&bytes[..20], "t"), Err(AudioError::Format(_))));
        assert!(matches!(decode_wav(b"not a wav file at all", "t"), Err(AudioError::Format(_))));
    }

    #[test]
    fn compressed_format_is_unsupported() {
        let mut bytes = wav_bytes(int_spec(1, 16), &[0i16; 8]);
        // fmt chunk starts at 12; audio format tag at offset 20. 2 = MS ADPCM.
        bytes[20] = 2;
        assert!(matches!(decode_wav(&bytes, "t"), Err(AudioError::UnsupportedCodec(_))));
    }

    #[test]
    fn eight_bit_and_multichannel_rejected() {
        let bytes = wav_bytes(int_spec(1, 8), &[0i8; 8]);
        assert!(matches!(decode_wav(&bytes, "t"), Err(AudioError::UnsupportedCodec(_))));
        let bytes = wav_bytes(int_spec(3, 16), &[0i16; 9]);
        assert!(matches!(decode_wav(&bytes, "t"), Err(AudioError::UnsupportedCodec(_))));
    }

    #[test]
    fn float_round_trip_is_lossless_for_f32_values() {
        let samples = vec![0.125, -0.333251953125, 1.0, -1.0];
        let clip = AudioClip::new(samples.clone(), 22_050, "f").unwrap();
        let back = decode_wav(&encode_wav_f32(&clip), "f").unwrap();
        assert_eq!(back.samples(), samples.as_slice());
        assert_eq!(back.sample_rate(), 22_050);
    }

    proptest! {
        #[test]
        fn pcm16_round_trip_bit_exact(raw in proptest::collection::vec(any::<i16>(), 1..512), rate in 1u32..96_000) {
            let samples: Vec<f64> = raw.iter().map(|&v| v as f64 / 32768.0).collect();
            let clip = AudioClip::new(samples, rate, "p").unwrap();
            let back = decode_wav(&encode_wav_pcm16(&clip), "p").unwrap();
            prop_assert_eq!(back.samples(), clip.samples());
            prop_assert_eq!(back.sample_rate(), rate);
        }
    }
}
