use serde::{Deserialize, Serialize};

use crate::features::FEATURE_DIM;

pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes: class priors and independent per-dimension normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

impl NaiveBayes {
    pub fn fit(x: &[[f64; FEATURE_DIM]], y: &[usize], n_classes: usize) -> Self {
        let mut counts = vec![0usize; n_classes];
        let mut means = vec![vec![0.0; FEATURE_DIM]; n_classes];
        for (row, &c) in x.iter().zip(y) {
            counts[c] += 1;
            for (m, v) in means[c].iter_mut().zip(row) {
                *m += v;
            }
        }
        for (m, &n) in means.iter_mut().zip(&counts) {
            if n > 0 {
                m.iter_mut().for_each(|v| *v /= n as f64);
            }
        }
        let mut variances = vec![vec![0.0; FEATURE_DIM]; n_classes];
        for (row, &c) in x.iter().zip(y) {
            for ((s, v), m) in variances[c].iter_mut().zip(row).zip(&means[c]) {
                *s += (v - m) * (v - m);
            }
        }
        for (s, &n) in variances.iter_mut().zip(&counts) {
            s.iter_mut().for_each(|v| *v = (*v / n.max(1) as f64).max(VARIANCE_FLOOR));
        }
        let priors = counts.iter().map(|&n| n as f64 / x.len() as f64).collect();
        NaiveBayes { priors, means, variances }
    }

    /// Posterior class probabilities, computed in log space.
    pub fn scores(&self, x: &[f64; FEATURE_DIM]) -> Vec<f64> {
        let log_post: Vec<f64> = self
            .priors
            .iter()
            .enumerate()
            .map(|(c, &p)| {
                if p == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let ll: f64 = x
                    .iter()
                    .zip(&self.means[c])
                    .zip(&self.variances[c])
                    .map(|((v, m), s2)| -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - (v - m) * (v - m) / (2.0 * s2))
                    .sum();
                p.ln() + ll
            })
            .collect();
        softmax(&log_post)
    }
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}
