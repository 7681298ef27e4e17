//! Leave-one-out evaluation of the full ensemble on a synthetic corpus,
//! next to a pitch-distribution-only baseline.
//!
//! cargo run --release --example synthetic_loocv -- [recordings-per-grammar] [frames]

use spd_raga::classifier::Metric;
use spd_raga::evaluation::{loocv_corpus, single_feature_loocv, Corpus};
use spd_raga::features::FeatureKind;
use spd_raga::ingest::GridConfig;
use spd_raga::pipeline::Extractor;
use spd_raga::spd::Relaxation;
use spd_raga::synth::{demo_grammars, write_corpus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let per: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(12);
    let frames: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4000);

    let dir = std::env::temp_dir().join(format!("spd-synthetic-loocv-{}", std::process::id()));
    let grid = GridConfig::default();
    let manifest = write_corpus(&dir, &demo_grammars(), per, frames, 7, &grid)?;
    let corpus = Corpus::from_manifest(&manifest, &Extractor::new(grid, Relaxation::new(4)?))?;

    let report = loocv_corpus(&corpus, 5, Metric::Bhattacharyya)?;
    println!("SPD ensemble accuracy: {:.4}", report.accuracy());
    println!("{}", report.confusion_csv()?);

    let pd = single_feature_loocv(&corpus, FeatureKind::PitchDistribution, 5, Metric::Bhattacharyya)?;
    println!("PD-only accuracy: {:.4}", pd.accuracy());
    println!("{}", pd.confusion_csv()?);

    let full = single_feature_loocv(&corpus, FeatureKind::Full, 5, Metric::Bhattacharyya)?;
    println!("single model on the full tensor: {:.4}", full.accuracy());

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
