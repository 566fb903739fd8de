//! L2-regularized logistic regression fitted by full-batch gradient descent.
//!
//! Objective: `mean(softplus(z) - y z) + l2/2 * |w|^2` with `z = w.x + b`;
//! the bias is not regularized.

use serde::{Deserialize, Serialize};

use super::{canonical_order, dot};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LrParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        LrParams { learning_rate: 0.1, epochs: 500, l2: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub fn logistic_objective(weights: &[f64], bias: f64, rows: &[Vec<f64>], labels: &[u8], l2: f64) -> f64 {
    let loss: f64 = rows
        .iter()
        .zip(labels)
        .map(|(x, &l)| {
            let z = dot(weights, x) + bias;
            softplus(z) - f64::from(l) * z
        })
        .sum();
    loss / rows.len().max(1) as f64 + 0.5 * l2 * dot(weights, weights)
}

/// Gradient of [`logistic_objective`]; `(d/dw, d/db)`.
pub fn logistic_gradient(weights: &[f64], bias: f64, rows: &[Vec<f64>], labels: &[u8], l2: f64) -> (Vec<f64>, f64) {
    let n = rows.len().max(1) as f64;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (x, &l) in rows.iter().zip(labels) {
        let r = sigmoid(dot(weights, x) + bias) - f64::from(l);
        for (g, v) in gw.iter_mut().zip(x) {
            *g += r * v;
        }
        gb += r;
    }
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (gw, gb / n)
}

impl LogisticRegression {
    pub fn fit(rows: &[Vec<f64>], labels: &[u8], params: LrParams) -> LogisticRegression {
        Self::fit_with_history(rows, labels, params).0
    }

    /// Also returns the objective before every step and after the last one.
    pub fn fit_with_history(rows: &[Vec<f64>], labels: &[u8], params: LrParams) -> (LogisticRegression, Vec<f64>) {
        let order = canonical_order(rows, labels);
        let rows: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();
        let labels: Vec<u8> = order.iter().map(|&i| labels[i]).collect();
        let d = rows.first().map_or(0, Vec::len);
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut history = Vec::with_capacity(params.epochs + 1);
        for _ in 0..params.epochs {
            history.push(logistic_objective(&w, b, &rows, &labels, params.l2));
            let (gw, gb) = logistic_gradient(&w, b, &rows, &labels, params.l2);
            for (v, g) in w.iter_mut().zip(&gw) {
                *v -= params.learning_rate * g;
            }
            b -= params.learning_rate * gb;
        }
        history.push(logistic_objective(&w, b, &rows, &labels, params.l2));
        (LogisticRegression { weights: w, bias: b }, history)
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.score(x) > 0.5)
    }
}
