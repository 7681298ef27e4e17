//! On-disk trained ensembles.
//!
//! ```text
//! store/
//!   manifest.csv       training manifest, paths resolved
//!   labels.txt         one label per line, index = line number
//!   weights.txt        25 combiner logits, one per line
//!   config.txt         r, k, metric and grid as key = value
//!   features/<id>.spd  feature cache file per training recording
//! ```

use std::path::Path;

use crate::cache;
use crate::classifier::{build_model, TrainedEnsemble};
use crate::error::{Error, Result};
use crate::evaluation::{Corpus, DatasetManifest, EvalConfig, ManifestEntry};
use crate::features::{FeatureKind, FEATURE_COUNT};
use crate::fsutil::{read_to_string, write_atomic};
use crate::ingest::GridConfig;
use crate::spd::Relaxation;

/// Settings a store was trained with; prediction must reuse them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoreConfig {
    pub eval: EvalConfig,
    pub grid: GridConfig,
}

impl StoreConfig {
    fn to_text(self) -> String {
        format!(
            "r = {}\nk = {}\nmetric = {}\nref_freq = {}\nconf_threshold = {}\n",
            self.eval.r.get(),
            self.eval.k,
            self.eval.metric,
            self.grid.ref_freq,
            self.grid.conf_threshold
        )
    }

    fn parse(text: &str) -> Result<Self> {
        let mut cfg = StoreConfig {
            eval: EvalConfig::default(),
            grid: GridConfig::default(),
        };
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected `key = value`"))?;
            let v = v.trim();
            let num = |what: &str| Error::parse(i + 1, format!("bad {what} `{v}`"));
            match k.trim() {
                "r" => cfg.eval.r = Relaxation::new(v.parse().map_err(|_| num("r"))?)?,
                "k" => cfg.eval.k = v.parse().map_err(|_| num("k"))?,
                "metric" => cfg.eval.metric = v.parse()?,
                "ref_freq" => cfg.grid.ref_freq = v.parse().map_err(|_| num("ref_freq"))?,
                "conf_threshold" => cfg.grid.conf_threshold = v.parse().map_err(|_| num("conf_threshold"))?,
                other => return Err(Error::parse(i + 1, format!("unknown key `{other}`"))),
            }
        }
        cfg.grid.validate()?;
        Ok(cfg)
    }
}

fn check_id(id: &str) -> Result<()> {
    if id.contains(['/', '\\']) || id.starts_with('.') {
        return Err(Error::Argument(format!("recording id `{id}` cannot be used as a file name")));
    }
    Ok(())
}

/// Fits an ensemble on the corpus and writes it to `dir`.
pub fn save(
    dir: &Path,
    manifest: &DatasetManifest,
    corpus: &Corpus,
    config: StoreConfig,
) -> Result<TrainedEnsemble> {
    for id in &corpus.ids {
        check_id(id)?;
    }
    let (ensemble, _) = TrainedEnsemble::fit(&corpus.labeled(), corpus.labels.clone(), config.eval.k, config.eval.metric)?;

    let resolved = DatasetManifest::new(
        manifest
            .entries
            .iter()
            .map(|e| ManifestEntry {
                pitch_path: manifest.pitch_path(e),
                tonic_path: manifest.tonic_path(e),
                ..e.clone()
            })
            .collect(),
        dir,
    )?;
    resolved.save(&dir.join("manifest.csv"))?;
    let labels: String = corpus.labels.iter().map(|l| format!("{l}\n")).collect();
    write_atomic(&dir.join("labels.txt"), labels.as_bytes())?;
    let weights: String = ensemble.weights.iter().map(|w| format!("{w}\n")).collect();
    write_atomic(&dir.join("weights.txt"), weights.as_bytes())?;
    write_atomic(&dir.join("config.txt"), config.to_text().as_bytes())?;
    for (id, spd) in corpus.ids.iter().zip(&corpus.tensors) {
        cache::write_file(&dir.join("features").join(format!("{id}.spd")), spd)?;
    }
    Ok(ensemble)
}

/// Loads an ensemble previously written by [`save`].
pub fn load(dir: &Path) -> Result<(TrainedEnsemble, StoreConfig)> {
    let config = StoreConfig::parse(&read_to_string(&dir.join("config.txt"))?)?;
    let labels: Vec<String> = read_to_string(&dir.join("labels.txt"))?
        .lines()
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    let weights = read_to_string(&dir.join("weights.txt"))?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| l.trim().parse::<f64>().map_err(|_| Error::parse(i + 1, format!("bad weight `{l}`"))))
        .collect::<Result<Vec<_>>>()?;
    if weights.len() != FEATURE_COUNT {
        return Err(Error::Format(format!("weights.txt has {} values, expected {FEATURE_COUNT}", weights.len())));
    }
    let manifest = DatasetManifest::load(&dir.join("manifest.csv"))?;
    let mut ids = Vec::new();
    let mut recording_labels = Vec::new();
    let mut tensors = Vec::new();
    for e in &manifest.entries {
        check_id(&e.id)?;
        if !labels.contains(&e.label) {
            return Err(Error::Format(format!("label `{}` missing from labels.txt", e.label)));
        }
        let spd = cache::read_file(&dir.join("features").join(format!("{}.spd", e.id)))
            .map_err(|err| err.in_entry(&e.id))?;
        if spd.r != config.eval.r {
            return Err(Error::Format(format!("feature file for `{}` has r = {}", e.id, spd.r.get())));
        }
        ids.push(e.id.clone());
        recording_labels.push(e.label.clone());
        tensors.push(spd);
    }
    let corpus = Corpus::new(ids, recording_labels, tensors)?;
    if corpus.labels != labels {
        return Err(Error::Format("labels.txt does not match the stored manifest".into()));
    }
    let models = FeatureKind::all()
        .map(|kind| build_model(kind, &corpus.labeled(), labels.len(), config.eval.k, config.eval.metric))
        .collect::<Result<Vec<_>>>()?;
    Ok((TrainedEnsemble::from_parts(models, weights, labels)?, config))
}
