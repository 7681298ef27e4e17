//! Pitch-track and tonic ingestion.
//!
//! Pitch tracks are read as `time<sep>frequency[<sep>confidence]` lines and
//! mapped onto a 720-bin absolute grid (6 octaves at 10 cents), then folded
//! to a single 120-bin octave and expressed relative to the tonic.

use crate::error::{Error, Result};

/// Bins per octave on the fine grid (10 cents each).
pub const BINS_PER_OCTAVE: usize = 120;
/// Octaves spanned by the absolute grid.
pub const OCTAVES: usize = 6;
/// Size of the absolute grid.
pub const GRID_BINS: usize = BINS_PER_OCTAVE * OCTAVES;
/// C2 with A4 = 440 Hz.
pub const DEFAULT_REF_FREQ: f64 = 65.40639;

/// One row of a pitch file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchFrame {
    pub time: f64,
    pub frequency: f64,
    pub confidence: Option<f64>,
}

/// A raw pitch track in file order. Frequency 0 encodes an unvoiced frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PitchSeries {
    pub frames: Vec<PitchFrame>,
}

/// A tonic-relative, octave-folded frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    Voiced(u8),
    Unvoiced,
}

impl Frame {
    pub fn bin(self) -> Option<usize> {
        match self {
            Frame::Voiced(b) => Some(b as usize),
            Frame::Unvoiced => None,
        }
    }
}

/// Per-frame folded bins in `[0, 120)` with unvoiced sentinels kept in place.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BinSequence {
    frames: Vec<Frame>,
}

impl BinSequence {
    /// Builds a sequence, rejecting voiced bins outside `[0, 120)`.
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        if let Some(pos) = frames
            .iter()
            .position(|f| matches!(f, Frame::Voiced(b) if *b as usize >= BINS_PER_OCTAVE))
        {
            return Err(Error::Argument(format!("frame {pos} has a bin outside [0, 120)")));
        }
        Ok(Self { frames })
    }

    /// Convenience constructor: `None` is unvoiced, `Some(b)` is taken mod 120.
    pub fn from_bins<I: IntoIterator<Item = Option<usize>>>(bins: I) -> Self {
        let frames = bins
            .into_iter()
            .map(|b| match b {
                Some(b) => Frame::Voiced((b % BINS_PER_OCTAVE) as u8),
                None => Frame::Unvoiced,
            })
            .collect();
        Self { frames }
    }

    /// All-voiced sequence from bin values taken mod 120.
    pub fn voiced<I: IntoIterator<Item = usize>>(bins: I) -> Self {
        Self::from_bins(bins.into_iter().map(Some))
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn voiced_count(&self) -> usize {
        self.frames.iter().filter(|f| matches!(f, Frame::Voiced(_))).count()
    }

    /// The same frames in reverse time order.
    pub fn reversed(&self) -> Self {
        Self {
            frames: self.frames.iter().rev().copied().collect(),
        }
    }
}

/// Parameters of the absolute pitch grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Frequency of absolute bin 0, in Hz.
    pub ref_freq: f64,
    pub bins_per_octave: usize,
    pub octaves: usize,
    /// Frames with a confidence below this are treated as unvoiced. 0 disables the filter.
    pub conf_threshold: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            ref_freq: DEFAULT_REF_FREQ,
            bins_per_octave: BINS_PER_OCTAVE,
            octaves: OCTAVES,
            conf_threshold: 0.0,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins_per_octave != BINS_PER_OCTAVE || self.bins_per_octave * self.octaves != GRID_BINS {
            return Err(Error::Argument(format!(
                "grid must be {BINS_PER_OCTAVE} bins x {OCTAVES} octaves, got {} x {}",
                self.bins_per_octave, self.octaves
            )));
        }
        if !(self.ref_freq.is_finite() && self.ref_freq > 0.0) {
            return Err(Error::Argument(format!("reference frequency must be positive, got {}", self.ref_freq)));
        }
        if !(0.0..=1.0).contains(&self.conf_threshold) {
            return Err(Error::Argument(format!(
                "confidence threshold must lie in [0, 1], got {}",
                self.conf_threshold
            )));
        }
        Ok(())
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(['\t', ',', ' '])
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_number(field: &str, line: usize, what: &str) -> Result<f64> {
    let value: f64 = field
        .parse()
        .map_err(|_| Error::parse(line, format!("{what} `{field}` is not a number")))?;
    if !value.is_finite() {
        return Err(Error::parse(line, format!("{what} `{field}` is not finite")));
    }
    Ok(value)
}

/// Parses a pitch track. Blank lines and `#` comments are skipped.
pub fn parse_pitch_file(text: &str) -> Result<PitchSeries> {
    let mut frames: Vec<PitchFrame> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::parse(
                line_no,
                format!("expected 2 or 3 fields, found {}", fields.len()),
            ));
        }
        let time = parse_number(fields[0], line_no, "time")?;
        let frequency = parse_number(fields[1], line_no, "frequency")?;
        if frequency < 0.0 {
            return Err(Error::parse(line_no, format!("negative frequency {frequency}")));
        }
        let confidence = match fields.get(2) {
            Some(f) => {
                let c = parse_number(f, line_no, "confidence")?;
                if !(0.0..=1.0).contains(&c) {
                    return Err(Error::parse(line_no, format!("confidence {c} outside [0, 1]")));
                }
                Some(c)
            }
            None => None,
        };
        if let Some(prev) = frames.last() {
            if time <= prev.time {
                return Err(Error::parse(
                    line_no,
                    format!("time {time} does not increase (previous {})", prev.time),
                ));
            }
        }
        frames.push(PitchFrame {
            time,
            frequency,
            confidence,
        });
    }
    Ok(PitchSeries { frames })
}

/// Parses a tonic annotation holding one positive frequency in Hz.
pub fn parse_tonic_file(text: &str) -> Result<f64> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::parse(1, "empty tonic file"));
    }
    let value = parse_number(trimmed, 1, "tonic")?;
    if value <= 0.0 {
        return Err(Error::parse(1, format!("tonic must be positive, got {value}")));
    }
    Ok(value)
}

/// Absolute bin on the 720-bin grid, clamped at both ends. `None` for f = 0.
pub fn absolute_bin(f: f64, cfg: &GridConfig) -> Option<usize> {
    if f <= 0.0 {
        return None;
    }
    let cents = 1200.0 * (f / cfg.ref_freq).log2();
    // f64::round rounds half away from zero.
    let bin = (cents / 10.0).round();
    let max = (cfg.bins_per_octave * cfg.octaves - 1) as f64;
    Some(bin.clamp(0.0, max) as usize)
}

/// Maps a frequency to its octave-folded bin.
pub fn freq_to_bin(f: f64, cfg: &GridConfig) -> Frame {
    match absolute_bin(f, cfg) {
        Some(b) => Frame::Voiced((b % cfg.bins_per_octave) as u8),
        None => Frame::Unvoiced,
    }
}

/// Converts a pitch track into tonic-relative folded bins.
pub fn to_bin_sequence(series: &PitchSeries, tonic: f64, cfg: &GridConfig) -> Result<BinSequence> {
    if !(tonic.is_finite() && tonic > 0.0) {
        return Err(Error::Argument(format!("tonic must be positive, got {tonic}")));
    }
    let tonic_bin = match freq_to_bin(tonic, cfg) {
        Frame::Voiced(b) => b as usize,
        Frame::Unvoiced => unreachable!("positive tonic always maps to a bin"),
    };
    let n = cfg.bins_per_octave;
    let frames = series
        .frames
        .iter()
        .map(|fr| {
            let confident = cfg.conf_threshold <= 0.0
                || fr.confidence.is_none_or(|c| c >= cfg.conf_threshold);
            if !confident {
                return Frame::Unvoiced;
            }
            match freq_to_bin(fr.frequency, cfg) {
                Frame::Voiced(b) => Frame::Voiced(((b as usize + n - tonic_bin) % n) as u8),
                Frame::Unvoiced => Frame::Unvoiced,
            }
        })
        .collect();
    Ok(BinSequence { frames })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tab_separated_with_unvoiced() {
        let s = parse_pitch_file("0.000\t220.0\n0.00444\t0.0").unwrap();
        assert_eq!(s.frames.len(), 2);
        assert_eq!(s.frames[0].frequency, 220.0);
        assert_eq!(s.frames[1].frequency, 0.0);
        assert_eq!(s.frames[1].confidence, None);
    }

    #[test]
    fn parses_comma_with_confidence() {
        let s = parse_pitch_file("0.0,440.0,0.92").unwrap();
        assert_eq!(s.frames.len(), 1);
        assert_eq!(s.frames[0].confidence, Some(0.92));
    }

    #[test]
    fn parses_space_runs_comments_and_blanks() {
        let s = parse_pitch_file("# header\n\n0.0   100.0\n  0.1  200.0  \n").unwrap();
        assert_eq!(s.frames.len(), 2);
        assert_eq!(s.frames[1].frequency, 200.0);
    }

    #[test]
    fn rejects_non_numeric_field() {
        match parse_pitch_file("0.0\tabc") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_pitch_file("0.0\t1.0\n\n0.1\tx") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_increasing_time() {
        assert!(matches!(
            parse_pitch_file("0.1\t100\n0.1\t100"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_pitch_file("0.2\t100\n0.1\t100"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn tonic_file_cases() {
        assert_eq!(parse_tonic_file("146.83\n").unwrap(), 146.83);
        assert_eq!(parse_tonic_file("  261.63  ").unwrap(), 261.63);
        assert!(parse_tonic_file("0").is_err());
        assert!(parse_tonic_file("").is_err());
        assert!(parse_tonic_file("-3").is_err());
    }

    #[test]
    fn a4_lands_on_bin_330() {
        let cfg = GridConfig::default();
        assert_eq!(absolute_bin(440.0, &cfg), Some(330));
        assert_eq!(freq_to_bin(440.0, &cfg), Frame::Voiced(90));
        assert_eq!(freq_to_bin(cfg.ref_freq, &cfg), Frame::Voiced(0));
    }

    #[test]
    fn below_grid_clamps_to_zero() {
        let cfg = GridConfig::default();
        // C1: cents = 1200 * log2(32.703 / 65.40639) ~ -1200
        let cents = 1200.0 * (32.703f64 / cfg.ref_freq).log2();
        assert!((cents + 1200.0).abs() < 0.05);
        assert_eq!(absolute_bin(32.703, &cfg), Some(0));
        assert_eq!(freq_to_bin(32.703, &cfg), Frame::Voiced(0));
        // far above the grid clamps to 719, folded 119
        assert_eq!(absolute_bin(20_000.0, &cfg), Some(719));
    }

    #[test]
    fn zero_frequency_is_unvoiced() {
        assert_eq!(freq_to_bin(0.0, &GridConfig::default()), Frame::Unvoiced);
    }

    #[test]
    fn tonic_relative_bins() {
        let cfg = GridConfig::default();
        let series = parse_pitch_file("0\t220\n0.1\t0\n0.2\t440").unwrap();
        let seq = to_bin_sequence(&series, 220.0, &cfg).unwrap();
        assert_eq!(
            seq.frames(),
            &[Frame::Voiced(0), Frame::Unvoiced, Frame::Voiced(0)]
        );

        // folded 20 against tonic folded 90
        let f = cfg.ref_freq * 2f64.powf(20.0 * 10.0 / 1200.0);
        let t = cfg.ref_freq * 2f64.powf(90.0 * 10.0 / 1200.0);
        let series = PitchSeries {
            frames: vec![PitchFrame { time: 0.0, frequency: f, confidence: None }],
        };
        let seq = to_bin_sequence(&series, t, &cfg).unwrap();
        assert_eq!(seq.frames(), &[Frame::Voiced(50)]);
    }

    #[test]
    fn rejects_bad_tonic() {
        let series = PitchSeries::default();
        assert!(to_bin_sequence(&series, 0.0, &GridConfig::default()).is_err());
        assert!(to_bin_sequence(&series, -1.0, &GridConfig::default()).is_err());
    }

    #[test]
    fn confidence_threshold_marks_frames_unvoiced() {
        let cfg = GridConfig {
            conf_threshold: 0.5,
            ..GridConfig::default()
        };
        let series = parse_pitch_file("0,220,0.9\n0.1,220,0.2\n0.2,220").unwrap();
        let seq = to_bin_sequence(&series, 220.0, &cfg).unwrap();
        assert_eq!(
            seq.frames(),
            &[Frame::Voiced(0), Frame::Unvoiced, Frame::Voiced(0)]
        );
    }

    #[test]
    fn grid_validation() {
        assert!(GridConfig::default().validate().is_ok());
        let bad = GridConfig {
            octaves: 5,
            ..GridConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_every_bin(b in 0usize..120) {
                let cfg = GridConfig::default();
                let f = cfg.ref_freq * 2f64.powf(10.0 * b as f64 / 1200.0);
                prop_assert_eq!(freq_to_bin(f, &cfg), Frame::Voiced(b as u8));
            }

            #[test]
            fn octave_folding(cents in 1.0f64..5900.0) {
                let cfg = GridConfig::default();
                let f = cfg.ref_freq * 2f64.powf(cents / 1200.0);
                let (a, b) = (absolute_bin(f, &cfg).unwrap(), absolute_bin(2.0 * f, &cfg).unwrap());
                prop_assume!(a > 0 && b < 719);
                prop_assert_eq!(freq_to_bin(f, &cfg), freq_to_bin(2.0 * f, &cfg));
            }

            #[test]
            fn transposition_invariance(
                cents in proptest::collection::vec(prop_oneof![Just(None), (1200.0f64..3600.0).prop_map(Some)], 1..60),
                tonic_cents in 1200.0f64..2400.0,
                shift in -40i32..40,
            ) {
                let cfg = GridConfig::default();
                let to_hz = |c: f64| cfg.ref_freq * 2f64.powf(c / 1200.0);
                let scale = 2f64.powf(10.0 * shift as f64 / 1200.0);
                let frames: Vec<PitchFrame> = cents.iter().enumerate().map(|(i, c)| PitchFrame {
                    time: i as f64 * 0.00444,
                    frequency: c.map_or(0.0, to_hz),
                    confidence: None,
                }).collect();
                let shifted: Vec<PitchFrame> = frames.iter().map(|f| PitchFrame { frequency: f.frequency * scale, ..*f }).collect();
                let tonic = to_hz(tonic_cents);
                let a = to_bin_sequence(&PitchSeries { frames }, tonic, &cfg).unwrap();
                let b = to_bin_sequence(&PitchSeries { frames: shifted }, tonic * scale, &cfg).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
