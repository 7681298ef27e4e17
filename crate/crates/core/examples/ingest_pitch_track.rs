//! Reads a pitch track and tonic, then prints the folded, tonic-relative bins.
//!
//! cargo run --example ingest_pitch_track -- [pitch.tsv tonic.txt]
//!
//! Without arguments a short built-in track is used.

use spd_raga::ingest::{parse_pitch_file, parse_tonic_file, to_bin_sequence, Frame, GridConfig};

const TRACK: &str = "\
# time\tfrequency\tconfidence
0.00000\t146.83\t0.98
0.00444\t147.10\t0.97
0.00888\t164.81\t0.95
0.01332\t0.0\t0.00
0.01776\t185.00\t0.91
0.02220\t220.00\t0.40
0.02664\t293.66\t0.99
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (pitch_text, tonic_text) = match args.as_slice() {
        [p, t] => (std::fs::read_to_string(p)?, std::fs::read_to_string(t)?),
        [] => (TRACK.to_string(), "146.83\n".to_string()),
        _ => return Err("expected either no arguments or <pitch> <tonic>".into()),
    };

    let series = parse_pitch_file(&pitch_text)?;
    let tonic = parse_tonic_file(&tonic_text)?;
    let strict = GridConfig {
        conf_threshold: 0.5,
        ..GridConfig::default()
    };

    for grid in [GridConfig::default(), strict] {
        let seq = to_bin_sequence(&series, tonic, &grid)?;
        println!(
            "confidence threshold {}: {} frames, {} voiced",
            grid.conf_threshold,
            seq.len(),
            seq.voiced_count()
        );
        let shown: Vec<String> = seq
            .frames()
            .iter()
            .take(20)
            .map(|f| match f {
                Frame::Voiced(b) => b.to_string(),
                Frame::Unvoiced => "-".into(),
            })
            .collect();
        println!("  bins: {}", shown.join(" "));
    }
    Ok(())
}
