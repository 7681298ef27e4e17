//! Distances between pitch distributions and a single KNN model over them.

use spd_raga::classifier::{bhattacharyya, manhattan, KnnModel, Metric};
use spd_raga::features::FeatureKind;
use spd_raga::spd::{build_spd, Relaxation};
use spd_raga::synth::{demo_grammars, generate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("D_B([1,0,0,0], uniform) = {:.4}", bhattacharyya(&[1.0, 0.0, 0.0, 0.0], &[0.25; 4])?);
    println!("D_B([1,0], [0,1])       = {:.3}", bhattacharyya(&[1.0, 0.0], &[0.0, 1.0])?);
    println!("L1([0.5,0.5], [1,0])    = {}", manhattan(&[0.5, 0.5], &[1.0, 0.0])?);

    let grammars = demo_grammars();
    let r = Relaxation::default();
    let feature = FeatureKind::V2(0);
    let mut model = KnnModel::new(feature, Metric::Bhattacharyya, 5, grammars.len())?;
    for (label, g) in grammars.iter().enumerate() {
        for rec in 0..4u64 {
            let spd = build_spd(&generate(g, 2000, 10 * label as u64 + rec)?, r);
            model.add(format!("{}_{rec}", g.name), &feature.extract_normalized(&spd), label)?;
        }
    }

    let query = build_spd(&generate(&grammars[3], 2000, 999)?, r);
    let q = feature.extract_normalized(&query);
    println!("\nnearest neighbours of a fresh {} recording on {feature}:", grammars[3].name);
    for n in model.neighbors(&q, None)? {
        println!("  {:<18} {:.4}", n.id, n.distance);
    }
    let votes = model.predict(&q, None)?;
    for (g, v) in grammars.iter().zip(votes) {
        println!("  vote {:<14} {v:.1}", g.name);
    }
    Ok(())
}
