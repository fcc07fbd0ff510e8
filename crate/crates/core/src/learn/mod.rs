//! Classifiers, cross-validation and hyperparameter search.

mod eval;
mod forest;
mod knn;
mod nb;
mod search;
mod spec;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{adjacency_rate, confusion_matrix, cross_validate, stratified_folds, ConfusionMatrix, EvaluationReport};
pub use forest::{derive_seed, RandomForest};
pub use knn::{Knn, MinMaxScaler};
pub use nb::{NaiveBayes, VARIANCE_FLOOR};
pub use search::{enumerate, grid_search, HyperGrid, LeaderboardEntry, SearchResult, SearchSpace};
pub use spec::{ClassifierKind, ClassifierSpec, ForestParams, KnnParams, Params, Scalar, TreeParams, Weighting};
pub use tree::{DecisionTree, Node};

use crate::features::{Dataset, FeatureVector, Target, FEATURE_DIM};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("empty-dataset")]
    EmptyDataset,
    #[error("bad-hyperparameter: {0}")]
    BadHyperparameter(String),
    #[error("non-finite-feature: component {0} is not finite")]
    NonFiniteFeature(usize),
    #[error("too-many-folds: {k} folds for {n} instances")]
    TooManyFolds { k: usize, n: usize },
    #[error("bad-folds: k must be at least 2, got {0}")]
    BadFolds(usize),
    #[error("length-mismatch: {truth} truth labels vs {pred} predictions")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("unknown-class: {0:?}")]
    UnknownClass(String),
    #[error("search-exhausted: every combination failed")]
    SearchExhausted,
    #[error("empty-search-space")]
    EmptySearchSpace,
    #[error("unsupported-model-format: version {0}, expected {MODEL_FORMAT_VERSION}")]
    UnsupportedFormat(u32),
    #[error("malformed-model: {0}")]
    MalformedModel(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelState {
    Nb(NaiveBayes),
    Tree(DecisionTree),
    Rf(RandomForest),
    Knn(Knn),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    pub spec: ClassifierSpec,
    pub target: Target,
    pub class_set: Vec<String>,
    pub state: ModelState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub class: String,
    pub class_index: usize,
    /// One score per entry of the model's class set, summing to 1.
    pub scores: Vec<f64>,
}

/// Trains on rows given as raw values and class indices into `class_set`.
pub fn train_raw(
    spec: &ClassifierSpec,
    x: &[[f64; FEATURE_DIM]],
    y: &[usize],
    target: Target,
    class_set: &[String],
) -> Result<Model, LearnError> {
    let params = spec.params()?;
    if x.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let n_classes = class_set.len();
    let state = match params {
        Params::Nb => ModelState::Nb(NaiveBayes::fit(x, y, n_classes)),
        Params::Tree(p) => ModelState::Tree(DecisionTree::fit::<rand_chacha::ChaCha8Rng>(
            x,
            y,
            n_classes,
            (0..x.len()).collect(),
            p,
            None,
        )),
        Params::Rf(p) => ModelState::Rf(RandomForest::fit(x, y, n_classes, p, spec.seed)),
        Params::Knn(_) => ModelState::Knn(Knn::fit(x, y)),
    };
    Ok(Model { format_version: MODEL_FORMAT_VERSION, spec: spec.clone(), target, class_set: class_set.to_vec(), state })
}

pub fn train(spec: &ClassifierSpec, ds: &Dataset) -> Result<Model, LearnError> {
    train_raw(spec, &ds.values(), &ds.class_indices(), ds.target, &ds.class_set)
}

impl Model {
    pub fn predict_values(&self, x: &[f64; FEATURE_DIM]) -> Result<Prediction, LearnError> {
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(LearnError::NonFiniteFeature(i));
        }
        let n = self.class_set.len();
        let scores = match &self.state {
            ModelState::Nb(m) => m.scores(x),
            ModelState::Tree(t) => t.scores(x).to_vec(),
            ModelState::Rf(f) => f.scores(x, n),
            ModelState::Knn(k) => match self.spec.params()? {
                Params::Knn(p) => k.scores(x, n, p),
                _ => return Err(LearnError::MalformedModel("knn state under a non-knn spec".into())),
            },
        };
        // first maximum wins, so ties go to the earlier class
        let class_index = scores.iter().enumerate().fold(0, |best, (i, &s)| if s > scores[best] { i } else { best });
        Ok(Prediction { class: self.class_set[class_index].clone(), class_index, scores })
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<Prediction, LearnError> {
        self.predict_values(&x.values())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("models serialize")
    }

    /// Parses a model file, refusing unknown format versions.
    pub fn from_json(s: &str) -> Result<Model, LearnError> {
        let raw: serde_json::Value = serde_json::from_str(s).map_err(|e| LearnError::MalformedModel(e.to_string()))?;
        let version = raw.get("format_version").and_then(serde_json::Value::as_u64);
        match version {
            Some(v) if v == MODEL_FORMAT_VERSION as u64 => {}
            Some(v) => return Err(LearnError::UnsupportedFormat(v as u32)),
            None => return Err(LearnError::MalformedModel("missing format_version".into())),
        }
        let m: Model = serde_json::from_value(raw).map_err(|e| LearnError::MalformedModel(e.to_string()))?;
        if m.kind_matches_state() {
            Ok(m)
        } else {
            Err(LearnError::MalformedModel("state does not match spec kind".into()))
        }
    }

    fn kind_matches_state(&self) -> bool {
        matches!(
            (self.spec.kind, &self.state),
            (ClassifierKind::Nb, ModelState::Nb(_))
                | (ClassifierKind::Tree, ModelState::Tree(_))
                | (ClassifierKind::Rf, ModelState::Rf(_))
                | (ClassifierKind::Knn, ModelState::Knn(_))
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::build_dataset;
    use crate::model::QualityLabel;

    fn fv(stds0: f64, q: u8) -> FeatureVector {
        let mut stds = [0.5; 30];
        stds[0] = stds0;
        FeatureVector { stds, delta_t_ms: 2000.0 + stds0, exercise: None, quality: Some(QualityLabel::new(q).unwrap()) }
    }

    fn specs() -> Vec<ClassifierSpec> {
        ClassifierKind::ALL.iter().map(|&k| ClassifierSpec::new(k).with_seed(3)).collect()
    }

    #[test]
    fn single_class_is_degenerate() {
        let ds = build_dataset(vec![fv(1.0, 2), fv(2.0, 2), fv(3.0, 2)], Target::Quality).unwrap();
        for s in specs() {
            let m = train(&s, &ds).unwrap();
            let p = m.predict(&fv(40.0, 1)).unwrap();
            assert_eq!(p.class, "2");
            assert_eq!(p.scores, vec![1.0], "{}", s.label());
        }
    }

    #[test]
    fn separable_training_fit() {
        let rows: Vec<_> = (0..20).map(|i| fv(i as f64, if i < 10 { 1 } else { 3 })).collect();
        let ds = build_dataset(rows.clone(), Target::Quality).unwrap();
        for s in specs() {
            let m = train(&s, &ds).unwrap();
            for r in &rows {
                let p = m.predict(r).unwrap();
                assert_eq!(p.class, r.quality.unwrap().to_string(), "{}", s.label());
                assert!((p.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        let ds = build_dataset(vec![fv(1.0, 1), fv(2.0, 2)], Target::Quality).unwrap();
        let m = train(&ClassifierSpec::new(ClassifierKind::Nb), &ds).unwrap();
        let mut bad = fv(1.0, 1);
        bad.stds[4] = f64::NAN;
        assert_eq!(m.predict(&bad), Err(LearnError::NonFiniteFeature(4)));
        let empty = build_dataset(vec![], Target::Quality).unwrap();
        assert_eq!(train(&ClassifierSpec::new(ClassifierKind::Tree), &empty), Err(LearnError::EmptyDataset));
    }

    #[test]
    fn nb_posterior_at_class_mean() {
        // two Gaussian classes 10 units apart on dimension 0 with unit spread
        let rows: Vec<_> = (0..40)
            .map(|i| {
                let jitter = if i % 2 == 0 { 1.0 } else { -1.0 };
                if i < 20 {
                    fv(jitter, 1)
                } else {
                    fv(10.0 + jitter, 2)
                }
            })
            .collect();
        let ds = build_dataset(rows, Target::Quality).unwrap();
        let m = train(&ClassifierSpec::new(ClassifierKind::Nb), &ds).unwrap();
        let p = m.predict(&fv(0.0, 1)).unwrap();
        assert_eq!(p.class, "1");
        assert!(p.scores[0] >= 0.99);
        // closed form: equal priors and variances, so the log odds are (μ2-μ1)(μ1+μ2-2x)/(2σ²) on each differing dimension
        let ModelState::Nb(nb) = &m.state else { panic!() };
        let mut log_odds = 0.0;
        for d in 0..FEATURE_DIM {
            let (m1, m2) = (nb.means[0][d], nb.means[1][d]);
            let v = nb.variances[0][d];
            if (m1 - m2).abs() > 0.0 {
                let x = if d == 0 { 0.0 } else { 2000.0 };
                log_odds += ((x - m2).powi(2) - (x - m1).powi(2)) / (2.0 * v);
            }
        }
        let expected = 1.0 / (1.0 + (-log_odds).exp());
        assert!((p.scores[0] - expected).abs() < 1e-9, "{} vs {expected}", p.scores[0]);
    }

    #[test]
    fn model_roundtrip_and_version_check() {
        let rows: Vec<_> = (0..12).map(|i| fv(i as f64, 1 + (i % 3) as u8)).collect();
        let ds = build_dataset(rows.clone(), Target::Quality).unwrap();
        for s in specs() {
            let m = train(&s, &ds).unwrap();
            let back = Model::from_json(&m.to_json()).unwrap();
            assert_eq!(back, m);
            for r in &rows {
                assert_eq!(back.predict(r).unwrap(), m.predict(r).unwrap());
            }
        }
        let m = train(&ClassifierSpec::new(ClassifierKind::Nb), &ds).unwrap();
        let json = m.to_json().replace("\"format_version\":1", "\"format_version\":2");
        assert_eq!(Model::from_json(&json), Err(LearnError::UnsupportedFormat(2)));
    }

    #[test]
    fn forest_training_is_reproducible() {
        let rows: Vec<_> = (0..30).map(|i| fv((i * 7 % 30) as f64, 1 + (i % 2) as u8)).collect();
        let ds = build_dataset(rows, Target::Quality).unwrap();
        let s = ClassifierSpec::new(ClassifierKind::Rf).with_seed(7).with("n_trees", 20);
        assert_eq!(train(&s, &ds).unwrap().to_json(), train(&s, &ds).unwrap().to_json());
    }
}
