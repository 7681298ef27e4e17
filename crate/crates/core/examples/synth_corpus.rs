//! Defines a grammar in text form, generates melodies from it and writes a
//! small corpus to disk.
//!
//! cargo run --example synth_corpus -- [out-dir]

use spd_raga::ingest::GridConfig;
use spd_raga::synth::{demo_grammars, generate, write_corpus, RagaGrammar};

const BHUPALI_LIKE: &str = "\
name = bhupali_like
scale = 0 20 40 70 90
ascent = 0>20 20>40 40>70 70>90 90>0
descent = 0>90 90>70 70>40 40>20 20>0
dwell = 12
dwell_jitter = 3
noise_sd = 0.8
phrase_len = 5
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "synthetic-corpus".into()));

    let custom = RagaGrammar::parse(BHUPALI_LIKE)?;
    let seq = generate(&custom, 60, 1)?;
    let bins: Vec<String> = seq.frames().iter().map(|f| f.bin().unwrap().to_string()).collect();
    println!("{} opening frames: {}", custom.name, bins.join(" "));

    let mut grammars = demo_grammars();
    grammars.push(custom);
    println!("\nbuilt-in grammar in text form:\n{}", grammars[2].to_text());

    let manifest = write_corpus(&out, &grammars, 3, 2000, 42, &GridConfig::default())?;
    println!("wrote {} recordings, manifest at {}", manifest.len(), out.join("manifest.csv").display());
    Ok(())
}
