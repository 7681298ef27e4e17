//! Content-addressed feature caching: the second extraction pass reads the
//! cache instead of recomputing.

use std::time::Instant;

use spd_raga::ingest::GridConfig;
use spd_raga::pipeline::Extractor;
use spd_raga::synth::{demo_grammars, write_corpus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::temp_dir().join(format!("spd-cache-demo-{}", std::process::id()));
    let manifest = write_corpus(&root, &demo_grammars(), 4, 6000, 9, &GridConfig::default())?;
    let extractor = Extractor::default().with_cache_dir(Some(root.join("cache")));

    let t = Instant::now();
    let cold = extractor.extract_all(&manifest)?;
    println!("cold: {} recordings in {:?}", cold.len(), t.elapsed());
    let t = Instant::now();
    let warm = extractor.extract_all(&manifest)?;
    println!("warm: {} recordings in {:?}", warm.len(), t.elapsed());
    assert_eq!(cold, warm);

    let files = std::fs::read_dir(root.join("cache"))?.count();
    println!("{files} cache files");
    std::fs::remove_dir_all(&root)?;
    Ok(())
}
