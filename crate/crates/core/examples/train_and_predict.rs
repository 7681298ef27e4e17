//! Trains an ensemble, stores it on disk, loads it back and classifies
//! recordings it has not seen.

use spd_raga::evaluation::{Corpus, EvalConfig};
use spd_raga::ingest::GridConfig;
use spd_raga::pipeline::Extractor;
use spd_raga::store::{self, StoreConfig};
use spd_raga::synth::{demo_grammars, write_corpus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::temp_dir().join(format!("spd-train-{}", std::process::id()));
    let grid = GridConfig::default();
    let train = write_corpus(&root.join("train"), &demo_grammars(), 6, 3000, 1, &grid)?;
    let test = write_corpus(&root.join("test"), &demo_grammars(), 2, 3000, 2, &grid)?;

    let extractor = Extractor::default();
    let corpus = Corpus::from_manifest(&train, &extractor)?;
    let config = StoreConfig {
        eval: EvalConfig::default(),
        grid,
    };
    let store_dir = root.join("store");
    store::save(&store_dir, &train, &corpus, config)?;

    let (ensemble, config) = store::load(&store_dir)?;
    let extractor = Extractor::new(config.grid, config.eval.r);
    let mut correct = 0;
    for entry in &test.entries {
        let spd = extractor.extract_entry(&test, entry)?;
        let p = ensemble.predict(&spd)?;
        let label = &ensemble.labels[p.label];
        correct += usize::from(*label == entry.label);
        println!("{:<18} -> {:<14} p = {:.3}", entry.id, label, p.probabilities[p.label]);
    }
    println!("{correct}/{} held-out recordings correct", test.len());
    std::fs::remove_dir_all(&root)?;
    Ok(())
}
