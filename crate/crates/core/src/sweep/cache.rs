use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use super::SweepError;
use crate::audio::Segment;
use crate::mfcc::{MfccConfig, MfccExtractor};

/// The config as it is hashed: `fmax` made explicit.
fn resolved(cfg: &MfccConfig) -> MfccConfig {
    MfccConfig { fmax: Some(cfg.fmax_hz()), ..cfg.clone() }
}

struct Entry {
    config: MfccConfig,
    values: Arc<Vec<f64>>,
}

/// Pooled feature vectors keyed by (segment id, config digest).
///
/// Each entry keeps the full config it was computed with, and a hit is only
/// served when that config matches the request, so a digest collision turns
/// into an error instead of silently wrong features.
#[derive(Default)]
pub struct FeatureCache {
    entries: Mutex<HashMap<(String, String), Entry>>,
    extractions: AtomicUsize,
}

impl FeatureCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of cold extractions performed so far.
    pub fn extractions(&self) -> usize {
        self.extractions.load(Ordering::SeqCst)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, segment_id: &str, cfg: &MfccConfig) -> Result<Option<Arc<Vec<f64>>>, SweepError> {
        let key = (segment_id.to_string(), cfg.digest());
        let entries = self.entries.lock().expect("cache lock");
        match entries.get(&key) {
            Some(e) if e.config == resolved(cfg) => Ok(Some(Arc::clone(&e.values))),
            Some(_) => Err(SweepError::DigestCollision(key.1)),
            None => Ok(None),
        }
    }

    /// Cached pooled MFCCs for `segment`, extracting on a miss. The lock is
    /// not held during extraction; if two threads race on one key, the first
    /// insert wins and both return identical values.
    pub fn get_or_extract(&self, segment: &Segment, extractor: &MfccExtractor) -> Result<Arc<Vec<f64>>, SweepError> {
        let cfg = extractor.config();
        let id = segment.id();
        if let Some(hit) = self.get(&id, cfg)? {
            return Ok(hit);
        }
        let values = extractor
            .pooled(&segment.samples)
            .map_err(|source| SweepError::Extraction { segment: id.clone(), source })?;
        self.extractions.fetch_add(1, Ordering::SeqCst);
        let mut entries = self.entries.lock().expect("cache lock");
        let entry = entries
            .entry((id, cfg.digest()))
            .or_insert_with(|| Entry { config: resolved(cfg), values: Arc::new(values) });
        Ok(Arc::clone(&entry.values))
    }
}
