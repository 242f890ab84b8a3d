use super::{AudioClip, IngestConfig, Segment};

/// Frames whose level is within this margin of the threshold count as at the
/// threshold. Keeps constant-level input intact despite rounding in the dB values.
const THRESHOLD_MARGIN_DB: f64 = 1e-9;

fn seconds_to_samples(seconds: f64, rate: u32) -> usize {
    (seconds * rate as f64).round() as usize
}

/// Cut a clip into consecutive, non-overlapping windows of `segment_seconds`.
/// The trailing remainder becomes a final, shorter segment only if it lasts
/// at least `min_keep_seconds`.
pub fn segment(clip: &AudioClip, cfg: &IngestConfig) -> Vec<Segment> {
    let rate = clip.sample_rate();
    let window = seconds_to_samples(cfg.segment_seconds, rate).max(1);
    clip.samples()
        .chunks(window)
        .filter(|chunk| chunk.len() == window || chunk.len() as f64 / rate as f64 >= cfg.min_keep_seconds)
        .enumerate()
        .map(|(index, chunk)| Segment {
            samples: chunk.to_vec(),
            sample_rate: rate,
            parent_id: clip.source_id().to_string(),
            index,
        })
        .collect()
}

/// RMS level in dBFS of consecutive non-overlapping frames (the last frame may
/// be short). Digitally silent frames yield `None`.
pub fn frame_levels_db(samples: &[f64], frame_len: usize) -> Vec<Option<f64>> {
    samples
        .chunks(frame_len.max(1))
        .map(|frame| {
            let mean_square = frame.iter().map(|s| s * s).sum::<f64>() / frame.len() as f64;
            (mean_square > 0.0).then(|| 10.0 * mean_square.log10())
        })
        .collect()
}

/// `mean - std` (population) of the measurable frame levels.
pub fn silence_threshold_db(levels: &[Option<f64>]) -> Option<f64> {
    let measured: Vec<f64> = levels.iter().flatten().copied().collect();
    if measured.is_empty() {
        return None;
    }
    let n = measured.len() as f64;
    let mean = measured.iter().sum::<f64>() / n;
    let var = measured.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n;
    Some(mean - var.sqrt())
}

/// Drop frames quieter than `mean - std` of the segment's frame levels and
/// splice the rest together. Returns `None` when the segment is entirely
/// silent or the survivors are shorter than `min_keep_seconds`.
pub fn remove_silence(seg: &Segment, cfg: &IngestConfig) -> Option<Segment> {
    let frame_len = ((cfg.silence_frame_ms / 1000.0) * seg.sample_rate as f64).round().max(1.0) as usize;
    let levels = frame_levels_db(&seg.samples, frame_len);
    let threshold = silence_threshold_db(&levels)?;

    let samples: Vec<f64> = seg
        .samples
        .chunks(frame_len)
        .zip(&levels)
        .filter(|(_, level)| matches!(level, Some(l) if *l >= threshold - THRESHOLD_MARGIN_DB))
        .flat_map(|(frame, _)| frame.iter().copied())
        .collect();

    let trimmed = Segment { samples, sample_rate: seg.sample_rate, parent_id: seg.parent_id.clone(), index: seg.index };
    (trimmed.duration_seconds() >= cfg.min_keep_seconds).then_some(trimmed)
}
