//! CART classification tree with Gini impurity.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Features considered per split; `None` means all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: 12, min_samples_leaf: 2, max_features: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf { counts: [u32; 2] },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
    /// Total weighted impurity decrease per feature, not normalized.
    pub impurity_decrease: Vec<f64>,
}

fn gini(c: [u32; 2]) -> f64 {
    let n = f64::from(c[0] + c[1]);
    if n == 0.0 {
        return 0.0;
    }
    let p = f64::from(c[1]) / n;
    2.0 * p * (1.0 - p)
}

fn counts_of(labels: &[u8], idx: &[usize]) -> [u32; 2] {
    let mut c = [0u32; 2];
    for &i in idx {
        c[usize::from(labels[i])] += 1;
    }
    c
}

struct Builder<'a, R: ?Sized> {
    rows: &'a [Vec<f64>],
    labels: &'a [u8],
    params: TreeParams,
    rng: Option<&'a mut R>,
    nodes: Vec<Node>,
    decrease: Vec<f64>,
    n_root: f64,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    child_impurity: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl<R: Rng + ?Sized> Builder<'_, R> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.rows[0].len();
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < d => {
                let mut f = sample(rng, d, m.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<BestSplit> {
        let min_leaf = self.params.min_samples_leaf.max(1);
        let total = counts_of(self.labels, idx);
        let mut best: Option<(usize, f64, f64, usize)> = None;
        let mut order: Vec<usize> = idx.to_vec();
        for f in self.candidate_features() {
            order.sort_by(|&a, &b| self.rows[a][f].total_cmp(&self.rows[b][f]).then(a.cmp(&b)));
            let mut left = [0u32; 2];
            for pos in 0..order.len() - 1 {
                left[usize::from(self.labels[order[pos]])] += 1;
                let n_left = pos + 1;
                let n_right = order.len() - n_left;
                let (a, b) = (self.rows[order[pos]][f], self.rows[order[pos + 1]][f]);
                if n_left < min_leaf || n_right < min_leaf || a >= b {
                    continue;
                }
                let right = [total[0] - left[0], total[1] - left[1]];
                let child = gini(left) * n_left as f64 + gini(right) * n_right as f64;
                if best.map_or(true, |(_, _, c, _)| child < c) {
                    let mut t = 0.5 * (a + b);
                    if t >= b {
                        t = a;
                    }
                    best = Some((f, t, child, n_left));
                }
            }
        }
        let (feature, threshold, child_impurity, _) = best?;
        let (left, right) = idx.iter().partition(|&&i| self.rows[i][feature] <= threshold);
        Some(BestSplit { feature, threshold, child_impurity, left, right })
    }

    fn grow(&mut self, idx: &[usize], depth: usize) -> usize {
        let counts = counts_of(self.labels, idx);
        let here = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });
        let pure = counts[0] == 0 || counts[1] == 0;
        if pure || depth >= self.params.max_depth || idx.len() < 2 * self.params.min_samples_leaf.max(1) {
            return here;
        }
        let parent = gini(counts) * idx.len() as f64;
        let Some(split) = self.best_split(idx) else {
            return here;
        };
        let gain = parent - split.child_impurity;
        if gain <= 1e-12 {
            return here;
        }
        self.decrease[split.feature] += gain / self.n_root;
        let left = self.grow(&split.left, depth + 1);
        let right = self.grow(&split.right, depth + 1);
        self.nodes[here] = Node::Split { feature: split.feature, threshold: split.threshold, left, right };
        here
    }
}

impl DecisionTree {
    /// Fits on the rows named by `idx`; duplicates act as sample weights, which
    /// is how bootstrap samples are passed in. `rng` is only consulted when
    /// `max_features` restricts the candidate set.
    pub fn fit_indices<R: Rng + ?Sized>(
        rows: &[Vec<f64>],
        labels: &[u8],
        idx: &[usize],
        params: TreeParams,
        rng: Option<&mut R>,
    ) -> DecisionTree {
        let d = rows.first().map_or(0, Vec::len);
        let mut b = Builder {
            rows,
            labels,
            params,
            rng,
            nodes: Vec::new(),
            decrease: vec![0.0; d],
            n_root: idx.len().max(1) as f64,
        };
        b.grow(idx, 0);
        DecisionTree { nodes: b.nodes, n_features: d, impurity_decrease: b.decrease }
    }

    pub fn fit(rows: &[Vec<f64>], labels: &[u8], params: TreeParams) -> DecisionTree {
        let idx: Vec<usize> = (0..rows.len()).collect();
        Self::fit_indices::<rand_chacha::ChaCha8Rng>(rows, labels, &idx, params, None)
    }

    fn leaf_counts(&self, x: &[f64]) -> [u32; 2] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return *counts,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Fraction of positive training rows in the leaf reached by `x`.
    pub fn score(&self, x: &[f64]) -> f64 {
        let c = self.leaf_counts(x);
        let n = c[0] + c[1];
        if n == 0 { 0.0 } else { f64::from(c[1]) / f64::from(n) }
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        let c = self.leaf_counts(x);
        u8::from(c[1] > c[0])
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        if self.nodes.is_empty() { 0 } else { walk(&self.nodes, 0) }
    }

    /// Impurity-decrease importance scaled to sum to one; all zeros for a
    /// tree that never split.
    pub fn feature_importances(&self) -> Vec<f64> {
        let total: f64 = self.impurity_decrease.iter().sum();
        if total <= 0.0 {
            return vec![0.0; self.n_features];
        }
        self.impurity_decrease.iter().map(|v| v / total).collect()
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("tree has no nodes".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Split { feature, threshold, left, right } = n {
                if *feature >= self.n_features || !threshold.is_finite() {
                    return Err(format!("node {i} has an invalid split"));
                }
                if *left <= i || *right <= i || *left >= self.nodes.len() || *right >= self.nodes.len() {
                    return Err(format!("node {i} has an invalid child link"));
                }
            }
        }
        Ok(())
    }
}
