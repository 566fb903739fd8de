use serde::{Deserialize, Serialize};

use super::model::{ModelParams, TrainedModel};
use crate::data::{LabeledSet, FEATURE_NAMES};
use crate::error::{Error, Result};

pub const DEFAULT_MI_BINS: usize = 10;

/// Non-negative per-feature scores summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceVector {
    pub scores: Vec<f64>,
}

impl ImportanceVector {
    /// Normalizes raw non-negative scores. An all-zero input carries no
    /// ranking information and becomes the uniform vector.
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let total: f64 = raw.iter().sum();
        let scores = if total > 0.0 {
            raw.iter().map(|v| v / total).collect()
        } else {
            vec![1.0 / raw.len().max(1) as f64; raw.len()]
        };
        ImportanceVector { scores }
    }

    /// Feature indices from most to least important; ties keep column order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        idx
    }

    pub fn named(&self) -> Vec<(&'static str, f64)> {
        self.scores
            .iter()
            .enumerate()
            .map(|(i, &s)| (FEATURE_NAMES.get(i).copied().unwrap_or("?"), s))
            .collect()
    }
}

/// Mutual information in bits between an equal-width-binned column and a
/// binary label.
pub fn mutual_information(column: &[f64], labels: &[u8], bins: usize) -> Result<f64> {
    if column.is_empty() {
        return Err(Error::EmptyInput("mutual information of an empty column".into()));
    }
    if column.len() != labels.len() {
        return Err(Error::Shape { expected: column.len(), got: labels.len() });
    }
    let bins = bins.max(1);
    let (lo, hi) = column.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let width = hi - lo;
    let mut joint = vec![[0usize; 2]; bins];
    for (&v, &l) in column.iter().zip(labels) {
        let b = if width > 0.0 { (((v - lo) / width) * bins as f64) as usize } else { 0 };
        joint[b.min(bins - 1)][usize::from(l)] += 1;
    }
    let n = column.len() as f64;
    let py = [0, 1].map(|y| joint.iter().map(|c| c[y]).sum::<usize>() as f64 / n);
    let mut mi = 0.0;
    for c in &joint {
        let px = (c[0] + c[1]) as f64 / n;
        for y in 0..2 {
            let pxy = c[y] as f64 / n;
            if pxy > 0.0 {
                mi += pxy * (pxy / (px * py[y])).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Per-algorithm importance: impurity decrease for DT/RF, mutual information
/// with the label for KNN (computed on `train`), absolute coefficients on
/// standardized features for SVM/LR. NB has no such notion.
pub fn feature_importance(model: &TrainedModel, train: &LabeledSet) -> Result<ImportanceVector> {
    let raw = match &model.params {
        ModelParams::DecisionTree(t) => t.impurity_decrease.clone(),
        ModelParams::RandomForest(f) => f.feature_importances(),
        ModelParams::Knn(_) => {
            if train.n_features() != model.n_features {
                return Err(Error::Shape { expected: model.n_features, got: train.n_features() });
            }
            (0..model.n_features)
                .map(|j| mutual_information(&train.column(j), &train.labels, DEFAULT_MI_BINS))
                .collect::<Result<_>>()?
        }
        ModelParams::Svm(m) => m.weights.iter().map(|w| w.abs()).collect(),
        ModelParams::Logistic(m) => m.weights.iter().map(|w| w.abs()).collect(),
        ModelParams::NaiveBayes(_) => return Err(Error::NotApplicable(model.algo.name().into())),
    };
    Ok(ImportanceVector::from_raw(raw))
}
