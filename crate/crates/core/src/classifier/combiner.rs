//! Weighted average of per-model probability outputs.
//!
//! One logit per model, softmax-normalized and shared across classes, fitted
//! by full-batch gradient ascent on the mean log-likelihood of the true labels.

use crate::error::{Error, Result};

/// Per-model probability rows for one recording (`models x labels`).
pub type Stack = Vec<Vec<f64>>;

const ROW_TOLERANCE: f64 = 1e-6;
const LIKELIHOOD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub learning_rate: f64,
    pub iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            iterations: 500,
        }
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.iter().map(|e| e / total).collect()
}

fn check_stack(stack: &Stack, models: usize, labels: usize) -> Result<()> {
    if stack.len() != models {
        return Err(Error::Argument(format!("stack has {} rows, expected {models}", stack.len())));
    }
    for (m, row) in stack.iter().enumerate() {
        if row.len() != labels {
            return Err(Error::Argument(format!("row {m} has {} labels, expected {labels}", row.len())));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > ROW_TOLERANCE || row.iter().any(|p| *p < 0.0) {
            return Err(Error::Argument(format!("row {m} is not a probability vector (sum {total})")));
        }
    }
    Ok(())
}

fn combine(stack: &Stack, alpha: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; stack[0].len()];
    for (row, a) in stack.iter().zip(alpha) {
        for (o, p) in out.iter_mut().zip(row) {
            *o += a * p;
        }
    }
    out
}

/// Weighted average `sum_m softmax(w)_m * stack_m` and its argmax. Ties go to
/// the lowest label index.
pub fn ensemble_predict(stack: &Stack, weights: &[f64]) -> Result<(Vec<f64>, usize)> {
    let labels = stack.first().map_or(0, |r| r.len());
    if labels == 0 {
        return Err(Error::Argument("empty stack".into()));
    }
    check_stack(stack, weights.len(), labels)?;
    let probs = combine(stack, &softmax(weights));
    let best = probs
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| if *p > probs[best] { i } else { best });
    Ok((probs, best))
}

fn validate(stacks: &[Stack], labels: &[usize]) -> Result<(usize, usize)> {
    if stacks.is_empty() {
        return Err(Error::Argument("no stacks to fit".into()));
    }
    if stacks.len() != labels.len() {
        return Err(Error::Argument(format!("{} stacks but {} labels", stacks.len(), labels.len())));
    }
    let models = stacks[0].len();
    let n_labels = stacks[0].first().map_or(0, |r| r.len());
    if models == 0 || n_labels == 0 {
        return Err(Error::Argument("empty stack".into()));
    }
    for (s, &y) in stacks.iter().zip(labels) {
        check_stack(s, models, n_labels)?;
        if y >= n_labels {
            return Err(Error::Argument(format!("label {y} outside {n_labels} classes")));
        }
    }
    Ok((models, n_labels))
}

/// Mean over recordings of `ln p(true label)`, floored at `ln(1e-12)`.
pub fn mean_log_likelihood(stacks: &[Stack], labels: &[usize], weights: &[f64]) -> Result<f64> {
    let (models, _) = validate(stacks, labels)?;
    if weights.len() != models {
        return Err(Error::Argument(format!("{} weights for {models} models", weights.len())));
    }
    let alpha = softmax(weights);
    let total: f64 = stacks
        .iter()
        .zip(labels)
        .map(|(s, &y)| {
            let p: f64 = s.iter().zip(&alpha).map(|(row, a)| a * row[y]).sum();
            p.max(LIKELIHOOD_FLOOR).ln()
        })
        .sum();
    Ok(total / stacks.len() as f64)
}

pub fn fit_ensemble_weights(stacks: &[Stack], labels: &[usize]) -> Result<Vec<f64>> {
    fit_ensemble_weights_with(stacks, labels, FitOptions::default())
}

/// Gradient ascent from all-zero logits (the uniform average).
pub fn fit_ensemble_weights_with(stacks: &[Stack], labels: &[usize], opts: FitOptions) -> Result<Vec<f64>> {
    let (models, _) = validate(stacks, labels)?;
    let n = stacks.len() as f64;
    let mut w = vec![0.0; models];
    for _ in 0..opts.iterations {
        let alpha = softmax(&w);
        // g_m = d(mean ln p) / d(alpha_m)
        let mut g = vec![0.0; models];
        for (s, &y) in stacks.iter().zip(labels) {
            let p: f64 = s.iter().zip(&alpha).map(|(row, a)| a * row[y]).sum();
            let p = p.max(LIKELIHOOD_FLOOR);
            for (gm, row) in g.iter_mut().zip(s) {
                *gm += row[y] / p;
            }
        }
        g.iter_mut().for_each(|v| *v /= n);
        let mean: f64 = alpha.iter().zip(&g).map(|(a, gm)| a * gm).sum();
        let mut moved = false;
        for ((wm, a), gm) in w.iter_mut().zip(&alpha).zip(&g) {
            let step = opts.learning_rate * a * (gm - mean);
            if step != 0.0 {
                moved = true;
            }
            *wm += step;
        }
        if !moved {
            break;
        }
    }
    Ok(w)
}
