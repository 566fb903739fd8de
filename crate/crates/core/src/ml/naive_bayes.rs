use serde::{Deserialize, Serialize};

use super::canonical_order;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NbParams {
    /// Lower bound on every per-class variance.
    pub var_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams { var_floor: 1e-9 }
    }
}

/// Gaussian naive Bayes with maximum-likelihood per-class moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_prior: [f64; 2],
    pub mean: [Vec<f64>; 2],
    pub var: [Vec<f64>; 2],
}

impl GaussianNb {
    pub fn fit(rows: &[Vec<f64>], labels: &[u8], params: NbParams) -> GaussianNb {
        let d = rows.first().map_or(0, Vec::len);
        let order = canonical_order(rows, labels);
        let mut count = [0usize; 2];
        let mut sum = [vec![0.0; d], vec![0.0; d]];
        for &i in &order {
            let c = usize::from(labels[i]);
            count[c] += 1;
            for (s, v) in sum[c].iter_mut().zip(&rows[i]) {
                *s += v;
            }
        }
        let mean: [Vec<f64>; 2] =
            std::array::from_fn(|c| sum[c].iter().map(|s| s / count[c].max(1) as f64).collect());
        let mut sq = [vec![0.0; d], vec![0.0; d]];
        for &i in &order {
            let c = usize::from(labels[i]);
            for ((s, v), m) in sq[c].iter_mut().zip(&rows[i]).zip(&mean[c]) {
                *s += (v - m) * (v - m);
            }
        }
        let var = std::array::from_fn(|c| {
            sq[c].iter().map(|s| (s / count[c].max(1) as f64).max(params.var_floor)).collect()
        });
        let n = rows.len().max(1) as f64;
        let log_prior = std::array::from_fn(|c| (count[c] as f64 / n).ln());
        GaussianNb { log_prior, mean, var }
    }

    fn joint_log(&self, x: &[f64]) -> [f64; 2] {
        std::array::from_fn(|c| {
            let ll: f64 = x
                .iter()
                .zip(&self.mean[c])
                .zip(&self.var[c])
                .map(|((v, m), s)| -0.5 * ((2.0 * std::f64::consts::PI * s).ln() + (v - m) * (v - m) / s))
                .sum();
            self.log_prior[c] + ll
        })
    }

    /// Posterior probability of the positive class.
    pub fn score(&self, x: &[f64]) -> f64 {
        let [l0, l1] = self.joint_log(x);
        1.0 / (1.0 + (l0 - l1).exp())
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.score(x) > 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_and_posterior_match_closed_form() {
        let rows = vec![vec![0.0], vec![2.0], vec![4.0], vec![6.0]];
        let labels = vec![0, 0, 1, 1];
        let m = GaussianNb::fit(&rows, &labels, NbParams::default());
        assert_eq!(m.mean[0], vec![1.0]);
        assert_eq!(m.mean[1], vec![5.0]);
        assert_eq!(m.var[0], vec![1.0]);
        // equal priors and variances: the boundary is the midpoint
        assert!((m.score(&[3.0]) - 0.5).abs() < 1e-12);
        assert_eq!(m.predict(&[3.0]), 0);
        let oracle = {
            let l1 = (-0.5f64 * (3.5f64 - 5.0).powi(2)).exp();
            let l0 = (-0.5f64 * (3.5f64 - 1.0).powi(2)).exp();
            l1 / (l0 + l1)
        };
        assert!((m.score(&[3.5]) - oracle).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_is_floored() {
        let rows = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![2.0, 5.0], vec![2.0, 6.0]];
        let m = GaussianNb::fit(&rows, &[0, 0, 1, 1], NbParams::default());
        assert_eq!(m.var[0][0], 1e-9);
        assert!(m.score(&[1.5, 3.0]).is_finite());
    }
}
