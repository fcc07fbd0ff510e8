use serde::{Deserialize, Serialize};

use super::spec::{KnnParams, Weighting};
use crate::features::FEATURE_DIM;

/// Per-dimension min-max scaling fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(x: &[[f64; FEATURE_DIM]]) -> Self {
        let mut mins = vec![f64::INFINITY; FEATURE_DIM];
        let mut maxs = vec![f64::NEG_INFINITY; FEATURE_DIM];
        for row in x {
            for (d, &v) in row.iter().enumerate() {
                mins[d] = mins[d].min(v);
                maxs[d] = maxs[d].max(v);
            }
        }
        MinMaxScaler { mins, maxs }
    }

    /// Constant dimensions map to 0.
    pub fn transform(&self, x: &[f64; FEATURE_DIM]) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        for (d, o) in out.iter_mut().enumerate() {
            let range = self.maxs[d] - self.mins[d];
            if range > 0.0 {
                *o = (x[d] - self.mins[d]) / range;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub scaler: MinMaxScaler,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Knn {
    pub fn fit(x: &[[f64; FEATURE_DIM]], y: &[usize]) -> Self {
        let scaler = MinMaxScaler::fit(x);
        let rows = x.iter().map(|r| scaler.transform(r).to_vec()).collect();
        Knn { scaler, rows, labels: y.to_vec() }
    }

    /// Votes of the `k` nearest training rows (Euclidean on scaled values,
    /// ties in distance resolved by training order).
    pub fn scores(&self, x: &[f64; FEATURE_DIM], n_classes: usize, params: KnnParams) -> Vec<f64> {
        let q = self.scaler.transform(x);
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(), i))
            .collect();
        let k = params.k.min(dist.len());
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let nearest = &dist[..k];
        let mut votes = vec![0.0; n_classes];
        match params.weighting {
            Weighting::Uniform => nearest.iter().for_each(|&(_, i)| votes[self.labels[i]] += 1.0),
            Weighting::InverseDistance => {
                // exact matches take all the weight
                if nearest[0].0 == 0.0 {
                    nearest.iter().filter(|n| n.0 == 0.0).for_each(|&(_, i)| votes[self.labels[i]] += 1.0);
                } else {
                    nearest.iter().for_each(|&(d, i)| votes[self.labels[i]] += 1.0 / d);
                }
            }
        }
        let total: f64 = votes.iter().sum();
        votes.iter_mut().for_each(|v| *v /= total);
        votes
    }
}
