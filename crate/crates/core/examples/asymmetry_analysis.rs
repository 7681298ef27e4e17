//! Direction asymmetry per grammar, written as CSV and an SVG bar chart.
//!
//! cargo run --release --example asymmetry_analysis -- [out-dir]

use spd_raga::evaluation::{asymmetry_by_label, asymmetry_csv, asymmetry_svg, Corpus};
use spd_raga::ingest::GridConfig;
use spd_raga::pipeline::Extractor;
use spd_raga::synth::{demo_grammars, write_corpus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "asymmetry-out".into()));
    let manifest = write_corpus(&out.join("corpus"), &demo_grammars(), 6, 3000, 3, &GridConfig::default())?;
    let corpus = Corpus::from_manifest(&manifest, &Extractor::default())?;

    let rows = asymmetry_by_label(&corpus)?;
    for r in &rows {
        println!("{:<14} {:.4}", r.label, r.score);
    }
    spd_raga::write_atomic(&out.join("asymmetry.csv"), asymmetry_csv(&rows)?.as_bytes())?;
    spd_raga::write_atomic(&out.join("asymmetry.svg"), asymmetry_svg(&rows).as_bytes())?;
    println!("wrote {}", out.display());
    Ok(())
}
