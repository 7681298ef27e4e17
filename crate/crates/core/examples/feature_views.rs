//! Splits an SPD tensor into the 25 features used by the classifier.

use spd_raga::features::{assemble_feature_set, split_v1, split_v2};
use spd_raga::spd::{build_spd, Relaxation};
use spd_raga::synth::{demo_grammars, generate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grammar = &demo_grammars()[4];
    let seq = generate(grammar, 3000, 1)?;
    let spd = build_spd(&seq, Relaxation::default());

    let v1 = split_v1(&spd);
    let v2 = split_v2(&spd);
    println!("v1: {} views of shape {:?}", v1.len(), v1[0].shape);
    println!("v2: {} views of shape {:?}", v2.len(), v2[0].shape);

    let features = assemble_feature_set(&spd);
    for f in &features.features {
        let raw: f64 = f.raw.data.iter().sum();
        let norm: f64 = f.normalized.data.iter().sum();
        println!("{:>6} {:<16} raw mass {raw:>6.1}  normalized {norm:.6}", f.kind.to_string(), format!("{:?}", f.raw.shape));
    }
    Ok(())
}
