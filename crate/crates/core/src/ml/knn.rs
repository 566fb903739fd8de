use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

/// Brute-force k-nearest-neighbour vote over (already standardized) rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

#[derive(PartialEq)]
struct Candidate(f64, usize);

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl Knn {
    pub fn fit(rows: Vec<Vec<f64>>, labels: Vec<u8>, params: KnnParams) -> Knn {
        Knn { k: params.k.max(1), rows, labels }
    }

    /// Indices of the `k` nearest training rows, nearest first. Equal
    /// distances are broken by the lower training index.
    pub fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let k = self.k.min(self.rows.len());
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        for (i, r) in self.rows.iter().enumerate() {
            let d: f64 = r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            let c = Candidate(d, i);
            if heap.len() < k {
                heap.push(c);
            } else if heap.peek().is_some_and(|worst| c < *worst) {
                heap.pop();
                heap.push(c);
            }
        }
        heap.into_sorted_vec().into_iter().map(|c| c.1).collect()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let n = self.neighbours(x);
        if n.is_empty() {
            return 0.0;
        }
        n.iter().filter(|&&i| self.labels[i] == 1).count() as f64 / n.len() as f64
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        let n = self.neighbours(x);
        let pos = n.iter().filter(|&&i| self.labels[i] == 1).count();
        u8::from(2 * pos > n.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_first_with_index_tiebreak() {
        let rows = vec![vec![2.0], vec![-1.0], vec![1.0], vec![5.0], vec![0.5]];
        let m = Knn::fit(rows, vec![1, 0, 1, 0, 1], KnnParams { k: 3 });
        // distances from 0: 4, 1, 1, 25, 0.25
        assert_eq!(m.neighbours(&[0.0]), vec![4, 1, 2]);
        assert_eq!(m.predict(&[0.0]), 1);
    }

    #[test]
    fn brute_force_oracle() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![((i * 37) % 50) as f64 / 7.0, ((i * 11) % 17) as f64]).collect();
        let labels: Vec<u8> = (0..50).map(|i| (i % 3 == 0) as u8).collect();
        let m = Knn::fit(rows.clone(), labels, KnnParams { k: 5 });
        let q = [3.3, 8.0];
        let mut all: Vec<(f64, usize)> =
            rows.iter().enumerate().map(|(i, r)| ((r[0] - q[0]).powi(2) + (r[1] - q[1]).powi(2), i)).collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let want: Vec<usize> = all[..5].iter().map(|p| p.1).collect();
        assert_eq!(m.neighbours(&q), want);
    }

    #[test]
    fn even_vote_is_negative() {
        let m = Knn::fit(vec![vec![0.0], vec![1.0]], vec![1, 0], KnnParams { k: 2 });
        assert_eq!(m.predict(&[0.5]), 0);
    }
}
