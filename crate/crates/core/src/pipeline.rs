//! File-to-tensor extraction with an optional content-addressed cache.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::cache::{cache_key, FeatureCache};
use crate::error::Result;
use crate::evaluation::{DatasetManifest, ManifestEntry};
use crate::fsutil::read_to_string;
use crate::ingest::{parse_pitch_file, parse_tonic_file, to_bin_sequence, BinSequence, GridConfig};
use crate::spd::{build_spd, Relaxation, SpdTensor};

/// Reads a pitch file and tonic file into a tonic-relative bin sequence.
pub fn load_bin_sequence(pitch: &Path, tonic: &Path, grid: &GridConfig) -> Result<BinSequence> {
    let pitch_text = read_to_string(pitch)?;
    let tonic_text = read_to_string(tonic)?;
    sequence_from_text(&pitch_text, &tonic_text, grid)
}

fn sequence_from_text(pitch_text: &str, tonic_text: &str, grid: &GridConfig) -> Result<BinSequence> {
    let series = parse_pitch_file(pitch_text)?;
    let tonic = parse_tonic_file(tonic_text)?;
    to_bin_sequence(&series, tonic, grid)
}

#[derive(Debug, Clone)]
pub struct Extractor {
    pub grid: GridConfig,
    pub r: Relaxation,
    pub cache: Option<FeatureCache>,
}

impl Extractor {
    pub fn new(grid: GridConfig, r: Relaxation) -> Self {
        Self { grid, r, cache: None }
    }

    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.cache = dir.map(FeatureCache::new);
        self
    }

    pub fn with_relaxation(&self, r: Relaxation) -> Self {
        Self { r, ..self.clone() }
    }

    /// Features of one pitch/tonic file pair, served from the cache when present.
    pub fn extract_files(&self, pitch: &Path, tonic: &Path) -> Result<SpdTensor> {
        self.grid.validate()?;
        let pitch_text = read_to_string(pitch)?;
        let tonic_text = read_to_string(tonic)?;
        let key = cache_key(&pitch_text, &tonic_text, self.r, &self.grid);
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.load(&key)) {
            if hit.r == self.r {
                return Ok(hit);
            }
        }
        let seq = sequence_from_text(&pitch_text, &tonic_text, &self.grid)?;
        let spd = build_spd(&seq, self.r);
        if let Some(cache) = &self.cache {
            cache.store(&key, &spd)?;
        }
        Ok(spd)
    }

    pub fn extract_entry(&self, manifest: &DatasetManifest, entry: &ManifestEntry) -> Result<SpdTensor> {
        self.extract_files(&manifest.pitch_path(entry), &manifest.tonic_path(entry))
            .map_err(|e| e.in_entry(&entry.id))
    }

    /// Tensors for every manifest entry, in manifest order.
    pub fn extract_all(&self, manifest: &DatasetManifest) -> Result<Vec<SpdTensor>> {
        manifest
            .entries
            .par_iter()
            .map(|e| self.extract_entry(manifest, e))
            .collect()
    }
}

impl Default for Extractor {
    fn default() -> Self {
        Self::new(GridConfig::default(), Relaxation::default())
    }
}
