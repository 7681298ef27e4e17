//! Sequential pitch distributions.
//!
//! For every ordered pair of chromatic pitch values `(p_s, p_e)` and each
//! direction, the distribution of bins traversed by every span that starts
//! near `p_s`, ends near `p_e` and stays on the circular arc between them.
//!
//! Two routes compute the per-cell counts: [`enumerate_pairs`] +
//! [`cell_histogram`] walks every valid `(i_s, i_e)` pair explicitly, and
//! [`fast_cell_histogram`] counts span coverage in one pass per cell.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{BinSequence, Frame, BINS_PER_OCTAVE};

/// Chromatic pitch values per octave (`p_s`, `p_e` ∈ {0, 10, …, 110}).
pub const NOTES: usize = 12;
pub const DIRECTIONS: usize = 2;
/// Bins between adjacent chromatic pitch values.
pub const NOTE_STEP: usize = BINS_PER_OCTAVE / NOTES;
/// Number of 120-bin slices in the full tensor.
pub const CELLS: usize = NOTES * NOTES * DIRECTIONS;
/// Total length of the flattened tensor.
pub const TENSOR_LEN: usize = CELLS * BINS_PER_OCTAVE;
pub const MAX_RELAXATION: u8 = 4;

const N: usize = BINS_PER_OCTAVE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Positive,
    Negative,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Positive, Direction::Negative];

    pub fn index(self) -> usize {
        match self {
            Direction::Positive => 0,
            Direction::Negative => 1,
        }
    }
}

/// Half-width, in bins, of the tolerance band around the endpoints and the arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relaxation(u8);

impl Relaxation {
    pub fn new(r: u8) -> Result<Self> {
        if r > MAX_RELAXATION {
            return Err(Error::Argument(format!(
                "relaxation must lie in [0, {MAX_RELAXATION}], got {r}"
            )));
        }
        Ok(Self(r))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl Default for Relaxation {
    fn default() -> Self {
        Self(MAX_RELAXATION)
    }
}

/// One `(p_s, p_e, direction)` cell of the tensor, stored as note indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    start: u8,
    end: u8,
    direction: Direction,
}

impl CellKey {
    /// Builds a key from bin values; both must be multiples of 10 below 120.
    pub fn new(p_s: usize, p_e: usize, direction: Direction) -> Result<Self> {
        for p in [p_s, p_e] {
            if p % NOTE_STEP != 0 || p >= N {
                return Err(Error::Argument(format!(
                    "pitch value {p} is not a multiple of {NOTE_STEP} in [0, {N})"
                )));
            }
        }
        Ok(Self::from_notes(p_s / NOTE_STEP, p_e / NOTE_STEP, direction))
    }

    /// Builds a key from note indices in `[0, 12)`.
    pub fn from_notes(start: usize, end: usize, direction: Direction) -> Self {
        assert!(start < NOTES && end < NOTES, "note index out of range");
        Self {
            start: start as u8,
            end: end as u8,
            direction,
        }
    }

    pub fn start_note(self) -> usize {
        self.start as usize
    }

    pub fn end_note(self) -> usize {
        self.end as usize
    }

    pub fn start_bin(self) -> usize {
        self.start as usize * NOTE_STEP
    }

    pub fn end_bin(self) -> usize {
        self.end as usize * NOTE_STEP
    }

    pub fn direction(self) -> Direction {
        self.direction
    }

    pub fn is_diagonal(self) -> bool {
        self.start == self.end
    }

    /// Position of this cell in `(start, end, direction)` row-major order.
    pub fn index(self) -> usize {
        (self.start as usize * NOTES + self.end as usize) * DIRECTIONS + self.direction.index()
    }

    /// All 288 cells in row-major order.
    pub fn all() -> impl Iterator<Item = CellKey> {
        (0..NOTES).flat_map(|i| {
            (0..NOTES).flat_map(move |j| Direction::ALL.into_iter().map(move |d| CellKey::from_notes(i, j, d)))
        })
    }

    /// The 264 off-diagonal cells in row-major order.
    pub fn transitions() -> impl Iterator<Item = CellKey> {
        Self::all().filter(|k| !k.is_diagonal())
    }
}

fn wrap(x: isize) -> usize {
    x.rem_euclid(N as isize) as usize
}

fn circular_distance(a: usize, b: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(N - d)
}

fn in_window(bin: usize, centre: usize, r: Relaxation) -> bool {
    circular_distance(bin, centre) <= r.get() as usize
}

/// Bins on the circular arc of a cell, in enumeration order.
///
/// Positive cells walk upward from `p_s - r` to `p_e + r`; negative cells walk
/// downward from `p_s + r` to `p_e - r`. Both ends are inclusive.
pub fn arc_set(key: CellKey, r: Relaxation) -> Vec<usize> {
    let r = r.get() as isize;
    let (ps, pe) = (key.start_bin() as isize, key.end_bin() as isize);
    let (from, to, step) = match key.direction {
        Direction::Positive => (wrap(ps - r), wrap(pe + r), 1),
        Direction::Negative => (wrap(ps + r), wrap(pe - r), -1),
    };
    let mut bins = vec![from];
    let mut b = from;
    while b != to {
        b = wrap(b as isize + step);
        bins.push(b);
    }
    bins
}

/// Membership table for [`arc_set`].
pub fn arc_mask(key: CellKey, r: Relaxation) -> [bool; N] {
    let mut mask = [false; N];
    for b in arc_set(key, r) {
        mask[b] = true;
    }
    mask
}

struct CellTest {
    arc: [bool; N],
    start: [bool; N],
    end: [bool; N],
}

impl CellTest {
    fn new(key: CellKey, r: Relaxation) -> Self {
        let mut start = [false; N];
        let mut end = [false; N];
        for b in 0..N {
            start[b] = in_window(b, key.start_bin(), r);
            end[b] = in_window(b, key.end_bin(), r);
        }
        Self {
            arc: arc_mask(key, r),
            start,
            end,
        }
    }

    fn on_arc(&self, f: Frame) -> bool {
        f.bin().is_some_and(|b| self.arc[b])
    }

    fn starts(&self, f: Frame) -> bool {
        f.bin().is_some_and(|b| self.start[b])
    }

    fn ends(&self, f: Frame) -> bool {
        f.bin().is_some_and(|b| self.end[b])
    }
}

/// Every `(i_s, i_e)` with `i_s < i_e` whose endpoints fall in the start and
/// end windows and whose interior frames are all voiced and on the arc.
pub fn enumerate_pairs(seq: &BinSequence, key: CellKey, r: Relaxation) -> Vec<(usize, usize)> {
    let test = CellTest::new(key, r);
    let frames = seq.frames();
    let mut pairs = Vec::new();
    for (s, &fs) in frames.iter().enumerate() {
        if !test.starts(fs) {
            continue;
        }
        for (e, &fe) in frames.iter().enumerate().skip(s + 1) {
            if test.ends(fe) {
                pairs.push((s, e));
            }
            // frame e would be interior to any later end
            if !test.on_arc(fe) {
                break;
            }
        }
    }
    pairs
}

/// Bin counts for one cell plus the number of spans that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellHistogram {
    pub counts: [u64; N],
    pub pairs: u64,
}

impl Default for CellHistogram {
    fn default() -> Self {
        Self {
            counts: [0; N],
            pairs: 0,
        }
    }
}

impl CellHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Sums the per-span histograms of the given pairs, endpoints inclusive.
pub fn cell_histogram(seq: &BinSequence, pairs: &[(usize, usize)]) -> CellHistogram {
    let frames = seq.frames();
    let mut hist = CellHistogram::default();
    for &(s, e) in pairs {
        for f in &frames[s..=e] {
            if let Some(b) = f.bin() {
                hist.counts[b] += 1;
            }
        }
    }
    hist.pairs = pairs.len() as u64;
    hist
}

/// Same counts as `cell_histogram(seq, &enumerate_pairs(seq, key, r))` in one
/// linear pass.
///
/// Valid spans never cross an off-arc or unvoiced frame, so the sequence
/// splits into maximal on-arc runs. Inside a run frame `t` is covered by
/// `|starts in [run_start, t]| * |ends in [t, run_end]|` spans. Start and end
/// windows are disjoint for `r <= 4`, so every such span has `i_s < i_e`.
pub fn fast_cell_histogram(seq: &BinSequence, key: CellKey, r: Relaxation) -> CellHistogram {
    let test = CellTest::new(key, r);
    let frames = seq.frames();
    let mut hist = CellHistogram::default();
    let mut starts_before: Vec<u64> = Vec::new();
    let mut i = 0;
    while i < frames.len() {
        if !test.on_arc(frames[i]) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < frames.len() && test.on_arc(frames[i]) {
            i += 1;
        }
        let run = &frames[run_start..i];

        starts_before.clear();
        let mut acc = 0u64;
        for &f in run {
            acc += test.starts(f) as u64;
            starts_before.push(acc);
        }
        if acc == 0 {
            continue;
        }
        let mut ends_after = 0u64;
        for (t, &f) in run.iter().enumerate().rev() {
            if test.ends(f) {
                ends_after += 1;
                hist.pairs += starts_before[t];
            }
            let b = f.bin().expect("run frames are voiced");
            hist.counts[b] += starts_before[t] * ends_after;
        }
    }
    hist
}

/// Normalized histogram of voiced bins; uniform when nothing is voiced.
pub fn pitch_distribution(seq: &BinSequence) -> Vec<f64> {
    let mut counts = [0u64; N];
    for b in seq.frames().iter().filter_map(|f| f.bin()) {
        counts[b] += 1;
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![1.0 / N as f64; N];
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Unnormalized per-cell histograms; diagonal cells are left empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSpd {
    pub cells: Vec<CellHistogram>,
}

impl RawSpd {
    pub fn cell(&self, key: CellKey) -> &CellHistogram {
        &self.cells[key.index()]
    }
}

pub fn build_raw_spd(seq: &BinSequence, r: Relaxation) -> RawSpd {
    let cells = CellKey::all()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|key| {
            if key.is_diagonal() {
                CellHistogram::default()
            } else {
                fast_cell_histogram(seq, key, r)
            }
        })
        .collect();
    RawSpd { cells }
}

/// The normalized SPD tensor of one recording, with its pitch distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdTensor {
    pub r: Relaxation,
    /// `12 x 12 x 2 x 120`, row-major over `(p_s/10, p_e/10, direction, bin)`.
    pub u: Vec<f64>,
    pub pd: Vec<f64>,
    /// `12 x 12 x 2`; true where the slice is a copy of `pd`.
    pub fallback: Vec<bool>,
}

impl SpdTensor {
    pub fn slice(&self, key: CellKey) -> &[f64] {
        let at = key.index() * N;
        &self.u[at..at + N]
    }

    pub fn slice_at(&self, start: usize, end: usize, direction: Direction) -> &[f64] {
        self.slice(CellKey::from_notes(start, end, direction))
    }

    pub fn is_fallback(&self, key: CellKey) -> bool {
        self.fallback[key.index()]
    }

    /// Normalizes raw counts, falling back to `pd` for empty and diagonal cells.
    pub fn from_raw(raw: &RawSpd, pd: Vec<f64>, r: Relaxation) -> Self {
        let mut u = vec![0.0; TENSOR_LEN];
        let mut fallback = vec![false; CELLS];
        for key in CellKey::all() {
            let idx = key.index();
            let out = &mut u[idx * N..(idx + 1) * N];
            let hist = &raw.cells[idx];
            let total = hist.total();
            if key.is_diagonal() || total == 0 {
                out.copy_from_slice(&pd);
                fallback[idx] = true;
            } else {
                let total = total as f64;
                for (o, &c) in out.iter_mut().zip(hist.counts.iter()) {
                    *o = c as f64 / total;
                }
            }
        }
        Self { r, u, pd, fallback }
    }
}

/// Extracts the SPD tensor and pitch distribution of a sequence.
pub fn build_spd(seq: &BinSequence, r: Relaxation) -> SpdTensor {
    let raw = build_raw_spd(seq, r);
    SpdTensor::from_raw(&raw, pitch_distribution(seq), r)
}
