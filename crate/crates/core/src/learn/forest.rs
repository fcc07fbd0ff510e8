use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::ForestParams;
use super::tree::DecisionTree;
use crate::features::FEATURE_DIM;

/// Seed of task `index` under `seed`, independent of scheduling order.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// Bagged trees with per-split feature sampling; predictions average the
/// trees' leaf distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub tree_seeds: Vec<u64>,
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn fit(x: &[[f64; FEATURE_DIM]], y: &[usize], n_classes: usize, params: ForestParams, seed: u64) -> Self {
        let tree_seeds: Vec<u64> = (0..params.n_trees as u64).map(|i| derive_seed(seed, i)).collect();
        let trees = tree_seeds
            .par_iter()
            .map(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let n = x.len();
                let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                DecisionTree::fit(x, y, n_classes, rows, params.tree, Some((params.mtry, &mut rng)))
            })
            .collect();
        RandomForest { tree_seeds, trees }
    }

    pub fn scores(&self, x: &[f64; FEATURE_DIM], n_classes: usize) -> Vec<f64> {
        let mut acc = vec![0.0; n_classes];
        for t in &self.trees {
            for (a, s) in acc.iter_mut().zip(t.scores(x)) {
                *a += s;
            }
        }
        let n = self.trees.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::spec::TreeParams;

    #[test]
    fn seeds_differ_per_tree_and_repeat() {
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }

    #[test]
    fn deterministic_and_normalized() {
        let x: Vec<[f64; FEATURE_DIM]> = (0..60)
            .map(|i| {
                let mut r = [0.0; FEATURE_DIM];
                for (d, v) in r.iter_mut().enumerate() {
                    *v = ((i * 31 + d * 17) % 23) as f64 + if i % 3 == 0 { 5.0 } else { 0.0 };
                }
                r
            })
            .collect();
        let y: Vec<usize> = (0..60).map(|i| (i % 3 == 0) as usize).collect();
        let p = ForestParams { n_trees: 25, mtry: 6, tree: TreeParams { min_leaf: 1, max_depth: None } };
        let a = RandomForest::fit(&x, &y, 2, p, 7);
        let b = RandomForest::fit(&x, &y, 2, p, 7);
        assert_eq!(a, b);
        assert_ne!(a, RandomForest::fit(&x, &y, 2, p, 8));
        let s = a.scores(&x[0], 2);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
