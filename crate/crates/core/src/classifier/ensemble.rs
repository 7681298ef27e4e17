use super::combiner::{ensemble_predict, fit_ensemble_weights, Stack};
use super::distance::Metric;
use super::knn::KnnModel;
use crate::error::{Error, Result};
use crate::features::{FeatureKind, FEATURE_COUNT};
use crate::spd::SpdTensor;

/// A recording's features with its label index.
#[derive(Debug, Clone, Copy)]
pub struct Labeled<'a> {
    pub id: &'a str,
    pub spd: &'a SpdTensor,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub probabilities: Vec<f64>,
    pub label: usize,
    pub stack: Stack,
}

/// 25 per-feature KNN models with learned combination weights.
#[derive(Debug, Clone)]
pub struct TrainedEnsemble {
    pub models: Vec<KnnModel>,
    pub weights: Vec<f64>,
    pub labels: Vec<String>,
}

/// Builds the KNN model for one feature over all recordings.
pub fn build_model(kind: FeatureKind, data: &[Labeled<'_>], n_labels: usize, k: usize, metric: Metric) -> Result<KnnModel> {
    let mut model = KnnModel::new(kind, metric, k, n_labels)?;
    for item in data {
        model.add(item.id, &kind.extract_normalized(item.spd), item.label)?;
    }
    Ok(model)
}

/// Leave-one-out `25 x n_labels` stacks for every recording, in input order.
///
/// Models are built and dropped one feature at a time.
pub fn out_of_fold_stacks(data: &[Labeled<'_>], n_labels: usize, k: usize, metric: Metric) -> Result<Vec<Stack>> {
    let mut stacks: Vec<Stack> = vec![Vec::with_capacity(FEATURE_COUNT); data.len()];
    for kind in FeatureKind::all() {
        let model = build_model(kind, data, n_labels, k, metric)?;
        for (stack, row) in stacks.iter_mut().zip(model.leave_one_out_predictions()?) {
            stack.push(row);
        }
    }
    Ok(stacks)
}

impl TrainedEnsemble {
    pub fn from_parts(models: Vec<KnnModel>, weights: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if models.len() != FEATURE_COUNT || weights.len() != FEATURE_COUNT {
            return Err(Error::Argument(format!(
                "ensemble needs {FEATURE_COUNT} models and weights, got {} and {}",
                models.len(),
                weights.len()
            )));
        }
        for (i, m) in models.iter().enumerate() {
            if m.feature() != FeatureKind::from_index(i) {
                return Err(Error::Argument(format!("model {i} is for feature {}", m.feature())));
            }
        }
        if labels.len() < 2 {
            return Err(Error::Argument("at least two labels are required".into()));
        }
        Ok(Self { models, weights, labels })
    }

    /// Fits weights on out-of-fold stacks and keeps all recordings as training data.
    /// Returns the ensemble together with the stacks it was fitted on.
    pub fn fit(data: &[Labeled<'_>], labels: Vec<String>, k: usize, metric: Metric) -> Result<(Self, Vec<Stack>)> {
        let n_labels = labels.len();
        let stacks = out_of_fold_stacks(data, n_labels, k, metric)?;
        let truth: Vec<usize> = data.iter().map(|d| d.label).collect();
        let weights = fit_ensemble_weights(&stacks, &truth)?;
        let models = FeatureKind::all()
            .map(|kind| build_model(kind, data, n_labels, k, metric))
            .collect::<Result<Vec<_>>>()?;
        Ok((Self::from_parts(models, weights, labels)?, stacks))
    }

    pub fn stack(&self, spd: &SpdTensor, exclude_id: Option<&str>) -> Result<Stack> {
        self.models
            .iter()
            .map(|m| m.predict(&m.feature().extract_normalized(spd), exclude_id))
            .collect()
    }

    pub fn predict(&self, spd: &SpdTensor) -> Result<Prediction> {
        let stack = self.stack(spd, None)?;
        let (probabilities, label) = ensemble_predict(&stack, &self.weights)?;
        Ok(Prediction {
            probabilities,
            label,
            stack,
        })
    }
}
