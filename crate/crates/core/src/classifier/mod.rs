//! Distance metrics, per-feature KNN models and the learned combiner.

mod combiner;
mod distance;
mod ensemble;
mod knn;

pub use combiner::{
    ensemble_predict, fit_ensemble_weights, fit_ensemble_weights_with, mean_log_likelihood, softmax, FitOptions,
    Stack,
};
pub use distance::{bhattacharyya, manhattan, Metric, BC_FLOOR, MAX_BHATTACHARYYA};
pub use ensemble::{build_model, out_of_fold_stacks, Labeled, Prediction, TrainedEnsemble};
pub use knn::{KnnModel, Neighbor};
