//! Accuracy over k, metric and relaxation on a noisy synthetic corpus.
//!
//! cargo run --release --example relaxation_sweep -- [noise-sd]

use spd_raga::evaluation::{sweep, SweepGrid};
use spd_raga::ingest::GridConfig;
use spd_raga::pipeline::Extractor;
use spd_raga::synth::{demo_grammars, write_corpus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let noise: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3.0);
    let mut grammars = demo_grammars();
    for g in &mut grammars {
        g.noise_sd = noise;
    }
    let dir = tempfile_dir("spd-sweep")?;
    let manifest = write_corpus(&dir, &grammars, 8, 2500, 5, &GridConfig::default())?;
    let extractor = Extractor::default().with_cache_dir(Some(dir.join("cache")));

    let table = sweep(&manifest, &SweepGrid::default(), &extractor)?;
    print!("{}", table.to_csv());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn tempfile_dir(prefix: &str) -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("{prefix}-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
