use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::spec::TreeParams;
use crate::features::FEATURE_DIM;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    /// Class distribution of the training samples that reached the leaf.
    Leaf { distribution: Vec<f64> },
    /// Samples with `x[dim] <= threshold` go left.
    Split { dim: usize, threshold: f64, left: usize, right: usize },
}

/// C4.5-style decision tree on numeric features. Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

fn entropy(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

struct Candidate {
    dim: usize,
    threshold: f64,
    gain: f64,
    ratio: f64,
}

/// Best threshold on one dimension by information gain; `order` is scratch space.
#[allow(clippy::too_many_arguments)]
fn best_threshold(
    x: &[[f64; FEATURE_DIM]],
    y: &[usize],
    rows: &[usize],
    dim: usize,
    n_classes: usize,
    min_leaf: usize,
    parent_info: f64,
    order: &mut Vec<usize>,
) -> Option<Candidate> {
    order.clear();
    order.extend_from_slice(rows);
    order.sort_by(|&a, &b| x[a][dim].total_cmp(&x[b][dim]));
    let n = order.len();
    let mut total = vec![0usize; n_classes];
    for &r in order.iter() {
        total[y[r]] += 1;
    }
    let mut left = vec![0usize; n_classes];
    let mut right = total;
    let mut best: Option<Candidate> = None;
    for i in 0..n - 1 {
        let c = y[order[i]];
        left[c] += 1;
        right[c] -= 1;
        let (a, b) = (x[order[i]][dim], x[order[i + 1]][dim]);
        let nl = i + 1;
        let nr = n - nl;
        if a == b || nl < min_leaf || nr < min_leaf {
            continue;
        }
        let (pl, pr) = (nl as f64 / n as f64, nr as f64 / n as f64);
        let gain = parent_info - pl * entropy(&left, nl) - pr * entropy(&right, nr);
        if best.as_ref().is_none_or(|b| gain > b.gain) {
            let mid = a + (b - a) / 2.0;
            let threshold = if mid < b { mid } else { a };
            let split_info = -(pl * pl.log2() + pr * pr.log2());
            best = Some(Candidate { dim, threshold, gain, ratio: gain / split_info });
        }
    }
    best
}

struct Builder<'a, R> {
    x: &'a [[f64; FEATURE_DIM]],
    y: &'a [usize],
    n_classes: usize,
    params: TreeParams,
    /// Dimensions drawn per split; `None` considers all of them.
    mtry: Option<(usize, &'a mut R)>,
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl<R: Rng> Builder<'_, R> {
    fn leaf(&mut self, counts: &[usize], n: usize) -> usize {
        let distribution = counts.iter().map(|&c| c as f64 / n as f64).collect();
        self.nodes.push(Node::Leaf { distribution });
        self.nodes.len() - 1
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let n = rows.len();
        let mut counts = vec![0usize; self.n_classes];
        for &r in &rows {
            counts[self.y[r]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let too_deep = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || too_deep || n < 2 * self.params.min_leaf {
            return self.leaf(&counts, n);
        }
        let dims: Vec<usize> = match &mut self.mtry {
            Some((m, rng)) if *m < FEATURE_DIM => {
                let mut d = sample(*rng, FEATURE_DIM, *m).into_vec();
                d.sort_unstable();
                d
            }
            _ => (0..FEATURE_DIM).collect(),
        };
        let info = entropy(&counts, n);
        let mut candidates = Vec::new();
        for dim in dims {
            if let Some(c) =
                best_threshold(self.x, self.y, &rows, dim, self.n_classes, self.params.min_leaf, info, &mut self.order)
            {
                if c.gain > 1e-12 {
                    candidates.push(c);
                }
            }
        }
        if candidates.is_empty() {
            return self.leaf(&counts, n);
        }
        // C4.5: highest gain ratio among splits with at least average gain
        let avg = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
        let best = candidates
            .iter()
            .filter(|c| c.gain >= avg - 1e-12)
            .fold(None, |best: Option<&Candidate>, c| match best {
                Some(b) if b.ratio >= c.ratio => Some(b),
                _ => Some(c),
            })
            .expect("the highest gain is at least the average");
        let (dim, threshold) = (best.dim, best.threshold);
        let (l, r): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&i| self.x[i][dim] <= threshold);
        let id = self.nodes.len();
        self.nodes.push(Node::Split { dim, threshold, left: 0, right: 0 });
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split { dim, threshold, left, right };
        id
    }
}

impl DecisionTree {
    /// Grows a tree on the rows listed in `rows` (duplicates allowed).
    pub fn fit<R: Rng>(
        x: &[[f64; FEATURE_DIM]],
        y: &[usize],
        n_classes: usize,
        rows: Vec<usize>,
        params: TreeParams,
        mtry: Option<(usize, &mut R)>,
    ) -> Self {
        let mut b = Builder { x, y, n_classes, params, mtry, nodes: Vec::new(), order: Vec::new() };
        b.grow(rows, 0);
        DecisionTree { nodes: b.nodes }
    }

    pub fn scores(&self, x: &[f64; FEATURE_DIM]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { distribution } => return distribution,
                Node::Split { dim, threshold, left, right } => i = if x[*dim] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}
