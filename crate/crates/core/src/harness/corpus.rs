use rayon::prelude::*;

use super::manifest::Manifest;
use super::HarnessError;
use crate::audio::{decode_wav, preprocess, IngestConfig};
use crate::sweep::{Corpus, LabeledSegment};

/// A manifest after decoding and preprocessing every clip.
#[derive(Clone, Debug)]
pub struct LoadedDataset {
    pub manifest: Manifest,
    pub corpus: Corpus,
    /// Clips that produced no segment of at least the minimum length.
    pub dropped: Vec<String>,
}

pub fn load_dataset(manifest: Manifest, ingest: &IngestConfig) -> Result<LoadedDataset, HarnessError> {
    ingest.validate().map_err(|e| HarnessError::Validation(e.to_string()))?;
    let per_clip = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let bytes = std::fs::read(&entry.path)
                .map_err(|e| HarnessError::Validation(format!("{}: {e}", entry.path.display())))?;
            let clip = decode_wav(&bytes, &entry.id)
                .map_err(|e| HarnessError::Validation(format!("{}: {e}", entry.path.display())))?;
            let segments = preprocess(&clip, ingest)
                .map_err(|e| HarnessError::Validation(format!("{}: {e}", entry.path.display())))?;
            Ok(segments
                .into_iter()
                .map(|segment| LabeledSegment { segment, label: entry.label, group: entry.group.clone() })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let mut items = Vec::new();
    let mut dropped = Vec::new();
    for (entry, segments) in manifest.entries.iter().zip(per_clip) {
        if segments.is_empty() {
            log::warn!("{}: clip {} has no usable segment and is dropped", manifest.name, entry.id);
            dropped.push(entry.id.clone());
        }
        items.extend(segments);
    }
    if items.is_empty() {
        return Err(HarnessError::Validation(format!(
            "{}: no clip yields a segment of at least {} s",
            manifest.name, ingest.min_keep_seconds
        )));
    }
    let corpus = Corpus { name: manifest.name.clone(), items };
    Ok(LoadedDataset { manifest, corpus, dropped })
}
