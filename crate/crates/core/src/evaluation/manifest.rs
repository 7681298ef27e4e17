use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::{read_to_string, write_atomic};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tradition {
    Hindustani,
    Carnatic,
    /// Any other tag, e.g. `synthetic`.
    Other(String),
}

impl FromStr for Tradition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Argument("empty tradition tag".into()));
        }
        Ok(match t.to_ascii_lowercase().as_str() {
            "hindustani" => Tradition::Hindustani,
            "carnatic" => Tradition::Carnatic,
            _ => Tradition::Other(t.to_string()),
        })
    }
}

impl fmt::Display for Tradition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tradition::Hindustani => write!(f, "Hindustani"),
            Tradition::Carnatic => write!(f, "Carnatic"),
            Tradition::Other(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    /// As written in the manifest; see [`DatasetManifest::pitch_path`].
    pub pitch_path: PathBuf,
    pub tonic_path: PathBuf,
    pub label: String,
    pub tradition: Tradition,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    id: String,
    pitch_path: String,
    tonic_path: String,
    label: String,
    tradition: String,
}

/// Recordings with their files and labels. Relative paths resolve against `base_dir`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let m = Self {
            entries,
            base_dir: base_dir.into(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    /// Parses CSV with header `id,pitch_path,tonic_path,label,tradition`.
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        let expected = ["id", "pitch_path", "tonic_path", "label", "tradition"];
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(Error::parse(1, format!("manifest header must be `{}`", expected.join(","))));
        }
        let mut entries = Vec::new();
        for (i, row) in reader.deserialize::<Row>().enumerate() {
            let row = row?;
            let tradition = row.tradition.parse().map_err(|e: Error| Error::parse(i + 2, e.to_string()))?;
            entries.push(ManifestEntry {
                id: row.id,
                pitch_path: row.pitch_path.into(),
                tonic_path: row.tonic_path.into(),
                label: row.label,
                tradition,
            });
        }
        Self::new(entries, base_dir)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if e.id.is_empty() {
                return Err(Error::Argument("manifest entry with empty id".into()));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(Error::Argument(format!("duplicate manifest id `{}`", e.id)));
            }
            if e.label.is_empty() {
                return Err(Error::Argument(format!("manifest entry `{}` has an empty label", e.id)));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            w.serialize(Row {
                id: e.id.clone(),
                pitch_path: e.pitch_path.to_string_lossy().into_owned(),
                tonic_path: e.tonic_path.to_string_lossy().into_owned(),
                label: e.label.clone(),
                tradition: e.tradition.to_string(),
            })?;
        }
        if self.entries.is_empty() {
            w.write_record(["id", "pitch_path", "tonic_path", "label", "tradition"])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::io("manifest", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv()?.as_bytes())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn pitch_path(&self, e: &ManifestEntry) -> PathBuf {
        self.resolve(&e.pitch_path)
    }

    pub fn tonic_path(&self, e: &ManifestEntry) -> PathBuf {
        self.resolve(&e.tonic_path)
    }

    /// Sorted distinct labels.
    pub fn labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self.entries.iter().map(|e| e.label.clone()).collect();
        labels.sort();
        labels.dedup();
        labels
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries whose label is in `keep`, preserving order.
    pub fn filter_labels(&self, keep: &[&str]) -> Self {
        Self {
            entries: self.entries.iter().filter(|e| keep.contains(&e.label.as_str())).cloned().collect(),
            base_dir: self.base_dir.clone(),
        }
    }
}
