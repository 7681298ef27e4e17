//! Deterministic synthetic melodies from simple ascent/descent grammars.
//!
//! A grammar walks its scale with one transition map while ascending and
//! another while descending, alternating every `phrase_len` notes. Each note
//! is held for a jittered number of frames and every frame gets rounded
//! Gaussian noise in bins.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::evaluation::{DatasetManifest, ManifestEntry, Tradition};
use crate::fsutil::write_atomic;
use crate::ingest::{BinSequence, GridConfig, BINS_PER_OCTAVE};

/// Seconds between synthetic frames.
pub const FRAME_PERIOD: f64 = 0.00444;

#[derive(Debug, Clone, PartialEq)]
pub struct RagaGrammar {
    pub name: String,
    pub scale: Vec<usize>,
    pub ascent: BTreeMap<usize, usize>,
    pub descent: BTreeMap<usize, usize>,
    pub dwell_mean: usize,
    pub dwell_jitter: usize,
    /// Standard deviation of per-frame noise, in bins.
    pub noise_sd: f64,
    pub phrase_len: usize,
}

fn chain(notes: &[usize]) -> BTreeMap<usize, usize> {
    notes.windows(2).map(|w| (w[0], w[1])).collect()
}

fn cycle(notes: &[usize]) -> BTreeMap<usize, usize> {
    let mut m = chain(notes);
    m.insert(*notes.last().expect("non-empty"), notes[0]);
    m
}

impl RagaGrammar {
    /// A grammar that follows the same note cycle in both phases.
    pub fn cyclic(name: &str, order: &[usize], dwell: usize, noise_sd: f64) -> Self {
        let mut scale = order.to_vec();
        scale.sort_unstable();
        Self {
            name: name.into(),
            scale,
            ascent: cycle(order),
            descent: cycle(order),
            dwell_mean: dwell,
            dwell_jitter: 0,
            noise_sd,
            phrase_len: order.len(),
        }
    }

    /// Ascends stepwise through `scale` (wrapping to the first note) and
    /// descends along `descent_path`, which should end where it started.
    pub fn with_paths(name: &str, scale: &[usize], descent_path: &[usize], dwell: usize, noise_sd: f64) -> Self {
        let mut scale = scale.to_vec();
        scale.sort_unstable();
        Self {
            name: name.into(),
            ascent: cycle(&scale),
            descent: chain(descent_path),
            scale,
            dwell_mean: dwell,
            dwell_jitter: 1,
            noise_sd,
            phrase_len: 6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Argument(format!("grammar `{}`: {m}", self.name)));
        if self.scale.is_empty() {
            return bad("empty scale".into());
        }
        if let Some(b) = self.scale.iter().find(|&&b| b >= BINS_PER_OCTAVE || b % 10 != 0) {
            return bad(format!("scale bin {b} is not a multiple of 10 below 120"));
        }
        for (which, map) in [("ascent", &self.ascent), ("descent", &self.descent)] {
            if map.is_empty() {
                return bad(format!("empty {which} map"));
            }
            if let Some((a, b)) = map.iter().find(|(a, b)| !self.scale.contains(a) || !self.scale.contains(b)) {
                return bad(format!("{which} transition {a}->{b} leaves the scale"));
            }
        }
        if self.dwell_mean < 1 {
            return bad("dwell must be at least 1".into());
        }
        if self.phrase_len < 1 {
            return bad("phrase_len must be at least 1".into());
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return bad(format!("noise_sd {} must be non-negative", self.noise_sd));
        }
        Ok(())
    }

    /// Parses `key = value` lines. Transition lists are `a>b` (or `a->b`) items
    /// separated by spaces or commas.
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = RagaGrammar {
            name: String::new(),
            scale: Vec::new(),
            ascent: BTreeMap::new(),
            descent: BTreeMap::new(),
            dwell_mean: 8,
            dwell_jitter: 0,
            noise_sd: 0.0,
            phrase_len: 4,
        };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, "expected `key = value`"))?;
            let value = value.trim();
            let items = || value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
            let int = |s: &str| -> Result<usize> {
                s.trim().parse().map_err(|_| Error::parse(line_no, format!("`{s}` is not a non-negative integer")))
            };
            match key.trim() {
                "name" => g.name = value.to_string(),
                "scale" => g.scale = items().map(int).collect::<Result<_>>()?,
                "ascent" | "descent" => {
                    let mut map = BTreeMap::new();
                    for item in items() {
                        let (a, b) = item
                            .split_once("->")
                            .or_else(|| item.split_once('>'))
                            .ok_or_else(|| Error::parse(line_no, format!("transition `{item}` is not `a>b`")))?;
                        map.insert(int(a)?, int(b)?);
                    }
                    if key.trim() == "ascent" {
                        g.ascent = map;
                    } else {
                        g.descent = map;
                    }
                }
                "dwell" => g.dwell_mean = int(value)?,
                "dwell_jitter" => g.dwell_jitter = int(value)?,
                "noise_sd" => {
                    g.noise_sd = value
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("`{value}` is not a number")))?
                }
                "phrase_len" => g.phrase_len = int(value)?,
                other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
            }
        }
        if g.name.is_empty() {
            return Err(Error::parse(0, "grammar has no name"));
        }
        g.scale.sort_unstable();
        g.scale.dedup();
        g.validate()?;
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let list = |m: &BTreeMap<usize, usize>| m.iter().map(|(a, b)| format!("{a}>{b}")).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(
            s,
            "scale = {}",
            self.scale.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ")
        );
        let _ = writeln!(s, "ascent = {}", list(&self.ascent));
        let _ = writeln!(s, "descent = {}", list(&self.descent));
        let _ = writeln!(s, "dwell = {}", self.dwell_mean);
        let _ = writeln!(s, "dwell_jitter = {}", self.dwell_jitter);
        let _ = writeln!(s, "noise_sd = {}", self.noise_sd);
        let _ = writeln!(s, "phrase_len = {}", self.phrase_len);
        s
    }
}

/// Generates `n_frames` folded bins. Notes missing from the active map jump
/// to the map's lowest key.
pub fn generate(grammar: &RagaGrammar, n_frames: usize, seed: u64) -> Result<BinSequence> {
    grammar.validate()?;
    if n_frames == 0 {
        return Err(Error::Argument("n_frames must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, grammar.noise_sd).map_err(|e| Error::Argument(e.to_string()))?;
    let mut bins = Vec::with_capacity(n_frames);
    let mut note = grammar.scale[0];
    let mut ascending = true;
    'outer: loop {
        let map = if ascending { &grammar.ascent } else { &grammar.descent };
        for _ in 0..grammar.phrase_len {
            let jitter = grammar.dwell_jitter as i64;
            let offset = if jitter > 0 { rng.gen_range(-jitter..=jitter) } else { 0 };
            let dwell = (grammar.dwell_mean as i64 + offset).max(1);
            for _ in 0..dwell {
                let shift = if grammar.noise_sd > 0.0 {
                    noise.sample(&mut rng).round() as i64
                } else {
                    0
                };
                bins.push((note as i64 + shift).rem_euclid(BINS_PER_OCTAVE as i64) as usize);
                if bins.len() == n_frames {
                    break 'outer;
                }
            }
            note = match map.get(&note) {
                Some(&next) => next,
                None => *map.keys().next().expect("validated non-empty"),
            };
        }
        ascending = !ascending;
    }
    Ok(BinSequence::voiced(bins))
}

/// Six pairwise-distinct grammars. The first two share one note cycle
/// traversed in opposite orders, so their pitch distributions coincide.
pub fn demo_grammars() -> Vec<RagaGrammar> {
    vec![
        RagaGrammar::cyclic("cycle_up", &[0, 20, 40, 70], 10, 1.0),
        RagaGrammar::cyclic("cycle_down", &[0, 70, 40, 20], 10, 1.0),
        RagaGrammar::with_paths("skip_descent", &[0, 20, 40, 50, 70, 90, 110], &[0, 90, 50, 20, 0], 9, 1.0),
        RagaGrammar::with_paths("step_descent", &[0, 20, 40, 50, 70, 90, 110], &[0, 110, 90, 70, 50, 40, 20, 0], 9, 1.0),
        RagaGrammar::with_paths("pentatonic", &[0, 20, 40, 70, 90], &[0, 70, 20, 0], 8, 1.0),
        RagaGrammar::with_paths("minor", &[0, 20, 30, 50, 70, 80, 100], &[0, 100, 80, 70, 50, 30, 20, 0], 7, 1.0),
    ]
}

/// Recording seed derived from a corpus seed and the grammar/recording position.
pub fn recording_seed(seed: u64, grammar: usize, recording: usize) -> u64 {
    seed ^ ((grammar as u64) << 32) ^ (recording as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Writes pitch and tonic files for every recording plus `manifest.csv`.
///
/// Tonics sit on the 10-cent grid of the C3 octave so every generated bin
/// survives the round trip through Hz exactly.
pub fn write_corpus(
    dir: &Path,
    grammars: &[RagaGrammar],
    per_grammar: usize,
    n_frames: usize,
    seed: u64,
    grid: &GridConfig,
) -> Result<DatasetManifest> {
    let mut entries = Vec::new();
    for (gi, g) in grammars.iter().enumerate() {
        for ri in 0..per_grammar {
            let rseed = recording_seed(seed, gi, ri);
            let seq = generate(g, n_frames, rseed)?;
            let tonic_abs = BINS_PER_OCTAVE + (ChaCha8Rng::seed_from_u64(rseed).gen_range(0..BINS_PER_OCTAVE));
            let hz = |abs: usize| grid.ref_freq * 2f64.powf(abs as f64 / BINS_PER_OCTAVE as f64);
            let mut pitch = String::with_capacity(n_frames * 20);
            for (i, f) in seq.frames().iter().enumerate() {
                let freq = f.bin().map_or(0.0, |b| hz(tonic_abs + b));
                let _ = writeln!(pitch, "{:.5}\t{:.6}", i as f64 * FRAME_PERIOD, freq);
            }
            let id = format!("{}_{:03}", g.name, ri);
            let pitch_rel = PathBuf::from("pitch").join(format!("{id}.tsv"));
            let tonic_rel = PathBuf::from("tonic").join(format!("{id}.tonic"));
            write_atomic(&dir.join(&pitch_rel), pitch.as_bytes())?;
            write_atomic(&dir.join(&tonic_rel), format!("{:.6}\n", hz(tonic_abs)).as_bytes())?;
            entries.push(ManifestEntry {
                id,
                pitch_path: pitch_rel,
                tonic_path: tonic_rel,
                label: g.name.clone(),
                tradition: Tradition::Other("synthetic".into()),
            });
        }
    }
    let manifest = DatasetManifest::new(entries, dir)?;
    manifest.save(&dir.join("manifest.csv"))?;
    Ok(manifest)
}
