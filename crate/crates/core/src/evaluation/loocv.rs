use std::collections::BTreeMap;

use super::manifest::DatasetManifest;
use super::report::{EvalReport, ReportRow};
use crate::classifier::{build_model, ensemble_predict, fit_ensemble_weights, out_of_fold_stacks, Labeled, Metric};
use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::pipeline::Extractor;
use crate::spd::{Relaxation, SpdTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EvalConfig {
    pub r: Relaxation,
    pub k: usize,
    pub metric: Metric,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            r: Relaxation::default(),
            k: 5,
            metric: Metric::Bhattacharyya,
        }
    }
}

/// Extracted recordings with labels, ready for evaluation.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub ids: Vec<String>,
    /// Label index per recording into `labels`.
    pub targets: Vec<usize>,
    /// Sorted label vocabulary.
    pub labels: Vec<String>,
    pub tensors: Vec<SpdTensor>,
}

impl Corpus {
    /// Builds a corpus from parallel id/label/tensor lists.
    pub fn new(ids: Vec<String>, labels: Vec<String>, tensors: Vec<SpdTensor>) -> Result<Self> {
        if ids.len() != labels.len() || ids.len() != tensors.len() {
            return Err(Error::Argument("ids, labels and tensors differ in length".into()));
        }
        let mut vocab = labels.clone();
        vocab.sort();
        vocab.dedup();
        let targets = labels
            .iter()
            .map(|l| vocab.binary_search(l).expect("label in vocabulary"))
            .collect();
        Ok(Self {
            ids,
            targets,
            labels: vocab,
            tensors,
        })
    }

    pub fn from_manifest(manifest: &DatasetManifest, extractor: &Extractor) -> Result<Self> {
        let tensors = extractor.extract_all(manifest)?;
        Self::new(
            manifest.entries.iter().map(|e| e.id.clone()).collect(),
            manifest.entries.iter().map(|e| e.label.clone()).collect(),
            tensors,
        )
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn labeled(&self) -> Vec<Labeled<'_>> {
        self.ids
            .iter()
            .zip(&self.tensors)
            .zip(&self.targets)
            .map(|((id, spd), &label)| Labeled { id, spd, label })
            .collect()
    }

    fn check(&self, k: usize) -> Result<Vec<String>> {
        if self.len() < k + 1 {
            return Err(Error::Argument(format!(
                "leave-one-out with k = {k} needs at least {} recordings, got {}",
                k + 1,
                self.len()
            )));
        }
        if self.labels.len() < 2 {
            return Err(Error::Argument("at least two labels are required".into()));
        }
        let mut per_class: BTreeMap<usize, usize> = BTreeMap::new();
        for &t in &self.targets {
            *per_class.entry(t).or_default() += 1;
        }
        Ok(per_class
            .into_iter()
            .filter(|&(_, n)| n < 2)
            .map(|(t, n)| format!("label `{}` has {n} recording(s); it cannot be recovered under leave-one-out", self.labels[t]))
            .collect())
    }

    fn report(&self, rows: Vec<ReportRow>, weights: Vec<f64>, warnings: Vec<String>) -> EvalReport {
        let mut rows = rows;
        rows.sort_by(|a, b| a.id.cmp(&b.id));
        EvalReport {
            labels: self.labels.clone(),
            rows,
            weights,
            warnings,
        }
    }
}

/// Full-ensemble leave-one-out on an extracted corpus.
///
/// Every recording is scored by all 25 models with itself excluded; combiner
/// weights are fitted on the collected out-of-fold stacks.
pub fn loocv_corpus(corpus: &Corpus, k: usize, metric: Metric) -> Result<EvalReport> {
    let warnings = corpus.check(k)?;
    let stacks = out_of_fold_stacks(&corpus.labeled(), corpus.labels.len(), k, metric)?;
    let weights = fit_ensemble_weights(&stacks, &corpus.targets)?;
    let rows = stacks
        .into_iter()
        .enumerate()
        .map(|(i, stack)| {
            let (probabilities, predicted) = ensemble_predict(&stack, &weights)?;
            Ok(ReportRow {
                id: corpus.ids[i].clone(),
                true_label: corpus.targets[i],
                predicted,
                probabilities,
                stack,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(corpus.report(rows, weights, warnings))
}

/// Extracts (or loads cached) features for a manifest and runs [`loocv_corpus`].
pub fn loocv(manifest: &DatasetManifest, cfg: &EvalConfig, extractor: &Extractor) -> Result<EvalReport> {
    let corpus = Corpus::from_manifest(manifest, &extractor.with_relaxation(cfg.r))?;
    loocv_corpus(&corpus, cfg.k, cfg.metric)
}

/// Leave-one-out with a single KNN model and no combiner (e.g. PD-only).
/// The prediction is the argmax of the vote fractions, ties to the lowest label.
pub fn single_feature_loocv(corpus: &Corpus, kind: FeatureKind, k: usize, metric: Metric) -> Result<EvalReport> {
    let warnings = corpus.check(k)?;
    let model = build_model(kind, &corpus.labeled(), corpus.labels.len(), k, metric)?;
    let rows = model
        .leave_one_out_predictions()?
        .into_iter()
        .enumerate()
        .map(|(i, probs)| {
            let predicted = probs
                .iter()
                .enumerate()
                .fold(0, |best, (c, p)| if *p > probs[best] { c } else { best });
            ReportRow {
                id: corpus.ids[i].clone(),
                true_label: corpus.targets[i],
                predicted,
                probabilities: probs.clone(),
                stack: vec![probs],
            }
        })
        .collect();
    Ok(corpus.report(rows, vec![0.0], warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::BinSequence;
    use crate::spd::build_spd;

    fn tensor(bins: &[usize]) -> SpdTensor {
        let seq = BinSequence::voiced(bins.iter().cycle().take(120).copied());
        build_spd(&seq, Relaxation::new(4).unwrap())
    }

    fn twin_corpus() -> Corpus {
        let a = tensor(&[0, 0, 20, 20, 40, 40, 70, 70]);
        let b = tensor(&[0, 0, 70, 70, 40, 40, 20, 20, 50]);
        Corpus::new(
            vec!["a1".into(), "b1".into(), "a2".into(), "b2".into()],
            vec!["A".into(), "B".into(), "A".into(), "B".into()],
            vec![a.clone(), b.clone(), a, b],
        )
        .unwrap()
    }

    #[test]
    fn class_twins_are_recovered() {
        let report = loocv_corpus(&twin_corpus(), 1, Metric::Bhattacharyya).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.accuracy(), 1.0);
        assert!(report.warnings.is_empty());
        let ids: Vec<_> = report.rows.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a1", "a2", "b1", "b2"]);
    }

    #[test]
    fn needs_k_plus_one_recordings() {
        assert!(loocv_corpus(&twin_corpus(), 4, Metric::Bhattacharyya).is_err());
    }

    #[test]
    fn singleton_class_is_a_warning() {
        let t = tensor(&[0, 10]);
        let c = Corpus::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec!["A".into(), "A".into(), "B".into()],
            vec![t.clone(), t.clone(), t],
        )
        .unwrap();
        let report = loocv_corpus(&c, 1, Metric::Manhattan).unwrap();
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.rows.len(), 3);
    }

    #[test]
    fn single_feature_run() {
        let report = single_feature_loocv(&twin_corpus(), FeatureKind::Full, 1, Metric::Bhattacharyya).unwrap();
        assert_eq!(report.accuracy(), 1.0);
    }
}
