use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cross_validate, ClassifierKind, ClassifierSpec, EvaluationReport, LearnError, Scalar};
use crate::features::Dataset;

/// Candidate values per hyperparameter; expands to their cartesian product.
/// An empty grid stands for the kind's defaults.
pub type HyperGrid = BTreeMap<String, Vec<Scalar>>;

/// Grids per classifier kind.
pub type SearchSpace = BTreeMap<ClassifierKind, Vec<HyperGrid>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub spec: ClassifierSpec,
    pub mean_accuracy: Option<f64>,
    pub accuracy: Option<f64>,
    pub training_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: ClassifierSpec,
    pub report: EvaluationReport,
    /// Every combination in enumeration order.
    pub leaderboard: Vec<LeaderboardEntry>,
}

fn expand(grid: &HyperGrid) -> Vec<BTreeMap<String, Scalar>> {
    let mut combos = vec![BTreeMap::new()];
    for (key, values) in grid {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut next = c.clone();
                    next.insert(key.clone(), v.clone());
                    next
                })
            })
            .collect();
    }
    combos
}

/// All specs of `space` in enumeration order: kinds in enum order, grids in
/// list order, then the cartesian product in key order.
pub fn enumerate(space: &SearchSpace, seed: u64) -> Vec<ClassifierSpec> {
    space
        .iter()
        .flat_map(|(&kind, grids)| {
            grids.iter().flat_map(expand).map(move |hyperparameters| ClassifierSpec { kind, hyperparameters, seed })
        })
        .collect()
}

/// Cross-validates every combination with the same folds and picks the best:
/// highest mean accuracy, then fewer hyperparameters, then kind order, then
/// enumeration order.
pub fn grid_search(space: &SearchSpace, ds: &Dataset, k: usize, seed: u64) -> Result<SearchResult, LearnError> {
    let specs = enumerate(space, seed);
    if specs.is_empty() {
        return Err(LearnError::EmptySearchSpace);
    }
    let results: Vec<Result<EvaluationReport, LearnError>> =
        specs.par_iter().map(|s| cross_validate(s, ds, k, seed)).collect();

    let leaderboard = specs
        .iter()
        .zip(&results)
        .map(|(spec, r)| match r {
            Ok(r) => LeaderboardEntry {
                spec: spec.clone(),
                mean_accuracy: Some(r.mean_accuracy),
                accuracy: Some(r.accuracy),
                training_ms: r.training_ms,
                error: None,
            },
            Err(e) => LeaderboardEntry {
                spec: spec.clone(),
                mean_accuracy: None,
                accuracy: None,
                training_ms: 0.0,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mut best: Option<(usize, &EvaluationReport)> = None;
    for (i, r) in results.iter().enumerate() {
        let Ok(r) = r else { continue };
        let better = match best {
            None => true,
            Some((b, br)) => {
                let key = |s: &ClassifierSpec| (s.hyperparameters.len(), s.kind);
                r.mean_accuracy > br.mean_accuracy
                    || (r.mean_accuracy == br.mean_accuracy && key(&specs[i]) < key(&specs[b]))
            }
        };
        if better {
            best = Some((i, r));
        }
    }
    let (i, report) = best.ok_or(LearnError::SearchExhausted)?;
    Ok(SearchResult { best: specs[i].clone(), report: report.clone(), leaderboard })
}
