//! Linear soft-margin SVM trained with Pegasos subgradient steps.
//!
//! Objective over labels `y in {-1, +1}`:
//! `lambda/2 * (|w|^2 + b^2) + mean(max(0, 1 - y (w.x + b)))`.
//! The bias is treated as the weight of a constant feature and is therefore
//! regularized too.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{canonical_order, dot};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { lambda: 1e-3, epochs: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sign(label: u8) -> f64 {
    if label == 1 { 1.0 } else { -1.0 }
}

pub fn svm_objective(weights: &[f64], bias: f64, rows: &[Vec<f64>], labels: &[u8], lambda: f64) -> f64 {
    let hinge: f64 = rows
        .iter()
        .zip(labels)
        .map(|(x, &l)| (1.0 - sign(l) * (dot(weights, x) + bias)).max(0.0))
        .sum();
    0.5 * lambda * (dot(weights, weights) + bias * bias) + hinge / rows.len().max(1) as f64
}

/// Subgradient of [`svm_objective`]; `(d/dw, d/db)`. At a hinge kink the
/// zero branch is taken.
pub fn svm_gradient(weights: &[f64], bias: f64, rows: &[Vec<f64>], labels: &[u8], lambda: f64) -> (Vec<f64>, f64) {
    let n = rows.len().max(1) as f64;
    let mut gw: Vec<f64> = weights.iter().map(|w| lambda * w).collect();
    let mut gb = lambda * bias;
    for (x, &l) in rows.iter().zip(labels) {
        let y = sign(l);
        if y * (dot(weights, x) + bias) < 1.0 {
            for (g, v) in gw.iter_mut().zip(x) {
                *g -= y * v / n;
            }
            gb -= y / n;
        }
    }
    (gw, gb)
}

impl LinearSvm {
    /// Rows are visited in a seeded shuffle of their canonical order each
    /// epoch, with step `1 / (lambda t)`. The returned model is the average
    /// of the iterates of the final epoch, which is far less noisy than the
    /// last iterate.
    pub fn fit(rows: &[Vec<f64>], labels: &[u8], params: SvmParams, seed: u64) -> LinearSvm {
        let d = rows.first().map_or(0, Vec::len);
        let lambda = params.lambda;
        let mut order = canonical_order(rows, labels);
        let mut rng = rng_from_seed(seed);
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut avg_w = vec![0.0; d];
        let mut avg_b = 0.0;
        let epochs = params.epochs.max(1);
        let mut t = 0u64;
        for epoch in 0..epochs {
            order.shuffle(&mut rng);
            let last = epoch + 1 == epochs;
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let y = sign(labels[i]);
                let margin = y * (dot(&w, &rows[i]) + b);
                let shrink = 1.0 - eta * lambda;
                w.iter_mut().for_each(|v| *v *= shrink);
                b *= shrink;
                if margin < 1.0 {
                    for (v, x) in w.iter_mut().zip(&rows[i]) {
                        *v += eta * y * x;
                    }
                    b += eta * y;
                }
                if last {
                    for (a, v) in avg_w.iter_mut().zip(&w) {
                        *a += v;
                    }
                    avg_b += b;
                }
            }
        }
        let n = order.len().max(1) as f64;
        avg_w.iter_mut().for_each(|a| *a /= n);
        LinearSvm { weights: avg_w, bias: avg_b / n }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// Positive only for a strictly positive margin.
    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.decision(x) > 0.0)
    }

    /// Logistic squashing of the decision value, for ranking only.
    pub fn score(&self, x: &[f64]) -> f64 {
        1.0 / (1.0 + (-self.decision(x)).exp())
    }
}
