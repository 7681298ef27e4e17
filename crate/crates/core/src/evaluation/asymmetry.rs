//! Direction asymmetry of a raga's transitions.
//!
//! Compares the positive slice `(i, j, +)` with the negative slice `(j, i, -)`
//! of the raga-averaged tensor. Both cover the same pitch region traversed in
//! opposite directions, so a melody that moves the same way up and down
//! scores 0.

use super::loocv::Corpus;
use crate::classifier::bhattacharyya;
use crate::error::{Error, Result};
use crate::ingest::BINS_PER_OCTAVE;
use crate::spd::{CellKey, Direction, SpdTensor, CELLS, NOTES, TENSOR_LEN};

const N: usize = BINS_PER_OCTAVE;

// Entry-wise mean with the addends sorted, so the result does not depend on
// recording order.
fn mean_tensor(tensors: &[&SpdTensor]) -> Vec<f64> {
    let n = tensors.len() as f64;
    let mut column = Vec::with_capacity(tensors.len());
    (0..TENSOR_LEN)
        .map(|i| {
            column.clear();
            column.extend(tensors.iter().map(|t| t.u[i]));
            column.sort_by(f64::total_cmp);
            column.iter().sum::<f64>() / n
        })
        .collect()
}

/// Mean Bhattacharyya distance between opposite-direction slices of the
/// averaged tensor, over note pairs with real transitions in both directions.
pub fn asymmetry_score(tensors: &[&SpdTensor]) -> Result<f64> {
    if tensors.is_empty() {
        return Err(Error::Argument("asymmetry needs at least one recording".into()));
    }
    let mut mean = mean_tensor(tensors);
    for slice in mean.chunks_exact_mut(N) {
        let total: f64 = slice.iter().sum();
        if total > 0.0 {
            slice.iter_mut().for_each(|v| *v /= total);
        }
    }
    let all_fallback: Vec<bool> = (0..CELLS).map(|c| tensors.iter().all(|t| t.fallback[c])).collect();
    let slice = |k: CellKey| &mean[k.index() * N..(k.index() + 1) * N];

    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..NOTES {
        for j in (0..NOTES).filter(|&j| j != i) {
            let pos = CellKey::from_notes(i, j, Direction::Positive);
            let neg = CellKey::from_notes(j, i, Direction::Negative);
            if all_fallback[pos.index()] || all_fallback[neg.index()] {
                continue;
            }
            let (a, b) = (slice(pos), slice(neg));
            // identical slices are exactly 0 apart; skip the log's rounding residue
            total += if a == b { 0.0 } else { bhattacharyya(a, b)? };
            pairs += 1;
        }
    }
    Ok(if pairs == 0 { 0.0 } else { total / pairs as f64 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryRow {
    pub label: String,
    pub recordings: usize,
    pub score: f64,
}

/// One score per label, in vocabulary order.
pub fn asymmetry_by_label(corpus: &Corpus) -> Result<Vec<AsymmetryRow>> {
    corpus
        .labels
        .iter()
        .enumerate()
        .map(|(li, label)| {
            let members: Vec<&SpdTensor> = corpus
                .targets
                .iter()
                .zip(&corpus.tensors)
                .filter(|(&t, _)| t == li)
                .map(|(_, s)| s)
                .collect();
            Ok(AsymmetryRow {
                label: label.clone(),
                recordings: members.len(),
                score: asymmetry_score(&members)?,
            })
        })
        .collect()
}

pub fn asymmetry_csv(rows: &[AsymmetryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "recordings", "asymmetry"])?;
    for r in rows {
        w.write_record([r.label.clone(), r.recordings.to_string(), format!("{:.6}", r.score)])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io("asymmetry", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::BinSequence;
    use crate::spd::{build_spd, Relaxation};

    fn spd(bins: &[usize]) -> SpdTensor {
        build_spd(&BinSequence::voiced(bins.iter().copied()), Relaxation::new(2).unwrap())
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(asymmetry_score(&[]).is_err());
    }

    #[test]
    fn all_fallback_scores_zero() {
        let t = spd(&[40, 40, 40]);
        assert_eq!(asymmetry_score(&[&t]).unwrap(), 0.0);
    }

    #[test]
    fn reversal_closed_pair_scores_zero() {
        let fwd = [0, 0, 20, 40, 40, 70, 90, 0, 50, 20, 0, 70, 40];
        let rev: Vec<usize> = fwd.iter().rev().copied().collect();
        let (a, b) = (spd(&fwd), spd(&rev));
        assert_eq!(asymmetry_score(&[&a, &b]).unwrap(), 0.0);
        assert_eq!(asymmetry_score(&[&b, &a]).unwrap(), 0.0);
        assert!(asymmetry_score(&[&a]).unwrap() > 0.0);
    }
}
