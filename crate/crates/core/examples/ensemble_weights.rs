//! Fits the softmax combiner on hand-made model outputs.

use spd_raga::classifier::{ensemble_predict, fit_ensemble_weights, mean_log_likelihood, softmax, Stack};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let models = 25;
    let labels = [0usize, 1, 2, 0, 1, 2];
    let stacks: Vec<Stack> = labels
        .iter()
        .map(|&y| {
            (0..models)
                .map(|m| match m {
                    // a model that always knows the answer
                    0 => (0..3).map(|c| if c == y { 1.0 } else { 0.0 }).collect(),
                    // a model that is right two times out of three
                    1 => (0..3).map(|c| if c == (y + usize::from(y == 2)) % 3 { 0.8 } else { 0.1 }).collect(),
                    _ => vec![1.0 / 3.0; 3],
                })
                .collect()
        })
        .collect();

    let start = vec![0.0; models];
    let weights = fit_ensemble_weights(&stacks, &labels)?;
    println!("mean log-likelihood: {:.4} -> {:.4}", mean_log_likelihood(&stacks, &labels, &start)?, mean_log_likelihood(&stacks, &labels, &weights)?);

    let share = softmax(&weights);
    println!("weight of the perfect model: {:.3}", share[0]);
    println!("weight of the noisy model:   {:.3}", share[1]);
    println!("weight of each uniform one:  {:.3}", share[2]);

    let (probs, label) = ensemble_predict(&stacks[2], &weights)?;
    println!("prediction for a label-2 recording: {label} {probs:.3?}");
    Ok(())
}
