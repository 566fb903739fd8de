//! Classifiers, data splitting, evaluation and feature importance.
//!
//! Six binary classifiers are implemented from scratch: CART decision tree,
//! k-nearest neighbours, random forest, linear soft-margin SVM, Gaussian
//! naive Bayes and logistic regression. Label `1` (authentic) is the
//! positive class; every tie resolves to `0`.

mod eval;
mod forest;
mod importance;
mod knn;
mod logistic;
mod metrics;
mod model;
mod naive_bayes;
mod split;
mod standardize;
mod svm;
mod timing;
mod tree;

pub use eval::{
    cross_validate, evaluate, evaluate_rows, holdout_evaluation, write_evaluation_csv, EvaluationRow,
};
pub use forest::{ForestParams, RandomForest};
pub use importance::{feature_importance, mutual_information, ImportanceVector, DEFAULT_MI_BINS};
pub use knn::{Knn, KnnParams};
pub use logistic::{logistic_gradient, logistic_objective, LogisticRegression, LrParams};
pub use metrics::{metrics_from_cm, ConfusionMatrix, Metrics};
pub use model::{train, Algo, Hyperparams, ModelParams, Prediction, TrainedModel, MODEL_SCHEMA_VERSION};
pub use naive_bayes::{GaussianNb, NbParams};
pub use split::{kfold, kfold_indices, split, split_indices};
pub use standardize::Standardizer;
pub use svm::{svm_gradient, svm_objective, LinearSvm, SvmParams};
pub use timing::{benchmark_inference, TimingRow};
pub use tree::{DecisionTree, TreeParams};

use std::cmp::Ordering;

/// Row order that depends only on row contents: lexicographic on the
/// features, then on the label. Iterative trainers walk rows in this order
/// so that shuffling the training set cannot change the fitted model.
pub(crate) fn canonical_order(rows: &[Vec<f64>], labels: &[u8]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.sort_by(|&a, &b| {
        rows[a]
            .iter()
            .zip(&rows[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
            .then(labels[a].cmp(&labels[b]))
    });
    idx
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
