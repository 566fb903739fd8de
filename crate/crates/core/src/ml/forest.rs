use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, max_depth: 12, min_samples_leaf: 2, max_features: Some(2), bootstrap: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_features: usize,
}

impl RandomForest {
    /// Tree `i` draws its bootstrap sample and feature subsets from a stream
    /// derived from `(seed, i)`, so trees can be grown in parallel and the
    /// result does not depend on thread scheduling.
    pub fn fit(rows: &[Vec<f64>], labels: &[u8], params: ForestParams, seed: u64) -> RandomForest {
        let n = rows.len();
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_samples_leaf: params.min_samples_leaf,
            max_features: params.max_features,
        };
        let trees = (0..params.n_trees.max(1))
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_from_seed(derive_seed(seed, i as u64));
                let idx: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_indices(rows, labels, &idx, tree_params, Some(&mut rng))
            })
            .collect();
        RandomForest { trees, n_features: rows.first().map_or(0, Vec::len) }
    }

    /// Fraction of trees voting positive.
    pub fn score(&self, x: &[f64]) -> f64 {
        let pos = self.trees.iter().filter(|t| t.predict(x) == 1).count();
        pos as f64 / self.trees.len() as f64
    }

    /// Majority vote; an even split is negative.
    pub fn predict(&self, x: &[f64]) -> u8 {
        let pos = self.trees.iter().filter(|t| t.predict(x) == 1).count();
        u8::from(2 * pos > self.trees.len())
    }

    /// Mean of the per-tree normalized importances, renormalized.
    pub fn feature_importances(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features];
        for t in &self.trees {
            for (a, v) in acc.iter_mut().zip(t.feature_importances()) {
                *a += v;
            }
        }
        let total: f64 = acc.iter().sum();
        if total > 0.0 {
            acc.iter_mut().for_each(|a| *a /= total);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<Vec<f64>>, Vec<u8>) {
        let rows: Vec<Vec<f64>> = (0..80).map(|i| vec![(i % 40) as f64, (i * 7 % 13) as f64, 1.0]).collect();
        let labels = rows.iter().map(|r| u8::from(r[0] >= 20.0)).collect();
        (rows, labels)
    }

    #[test]
    fn same_seed_same_forest() {
        let (rows, labels) = toy();
        let p = ForestParams { n_trees: 12, ..Default::default() };
        assert_eq!(RandomForest::fit(&rows, &labels, p, 3), RandomForest::fit(&rows, &labels, p, 3));
    }

    #[test]
    fn learns_a_threshold() {
        let (rows, labels) = toy();
        let f = RandomForest::fit(&rows, &labels, ForestParams { n_trees: 25, ..Default::default() }, 1);
        let acc = rows.iter().zip(&labels).filter(|(r, &l)| f.predict(r) == l).count();
        assert!(acc >= 76, "{acc}");
        let imp = f.feature_importances();
        assert!(imp[0] > imp[1] && imp[0] > imp[2]);
    }

    #[test]
    fn even_vote_is_negative() {
        let pos = DecisionTree::fit(&[vec![0.0], vec![1.0]], &[1, 1], TreeParams::default());
        let neg = DecisionTree::fit(&[vec![0.0], vec![1.0]], &[0, 0], TreeParams::default());
        let f = RandomForest { trees: vec![pos, neg], n_features: 1 };
        assert_eq!(f.predict(&[0.5]), 0);
        assert_eq!(f.score(&[0.5]), 0.5);
    }
}
