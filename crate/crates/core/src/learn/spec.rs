use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::features::FEATURE_DIM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Nb,
    Tree,
    Rf,
    Knn,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] =
        [ClassifierKind::Nb, ClassifierKind::Tree, ClassifierKind::Rf, ClassifierKind::Knn];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Nb => "nb",
            ClassifierKind::Tree => "tree",
            ClassifierKind::Rf => "rf",
            ClassifierKind::Knn => "knn",
        }
    }

    /// Hyperparameters this kind accepts.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            ClassifierKind::Nb => &[],
            ClassifierKind::Tree => &["max_depth", "min_leaf"],
            ClassifierKind::Rf => &["max_depth", "min_leaf", "mtry", "n_trees"],
            ClassifierKind::Knn => &["k", "weighting"],
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = LearnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| LearnError::BadHyperparameter(format!("unknown classifier kind {s:?}")))
    }
}

/// A hyperparameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    fn as_int(&self) -> Option<i64> {
        match *self {
            Scalar::Int(i) => Some(i),
            Scalar::Float(f) if f.fract() == 0.0 && f.abs() < 1e15 => Some(f as i64),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Float(x) => write!(f, "{x}"),
            Scalar::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, Scalar>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub mtry: usize,
    pub tree: TreeParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnParams {
    pub k: usize,
    pub weighting: Weighting,
}

/// Hyperparameters of a spec with defaults filled in and ranges checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Params {
    Nb,
    Tree(TreeParams),
    Rf(ForestParams),
    Knn(KnnParams),
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind) -> Self {
        ClassifierSpec { kind, hyperparameters: BTreeMap::new(), seed: 0 }
    }

    pub fn with(mut self, key: &str, value: impl Into<Scalar>) -> Self {
        self.hyperparameters.insert(key.to_string(), value.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `kind` followed by `key=value` pairs, e.g. `rf n_trees=100 mtry=6`.
    pub fn label(&self) -> String {
        let mut s = self.kind.to_string();
        for (k, v) in &self.hyperparameters {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    pub fn params(&self) -> Result<Params, LearnError> {
        let allowed = self.kind.keys();
        if let Some(k) = self.hyperparameters.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(LearnError::BadHyperparameter(format!("{} does not take {k:?}", self.kind)));
        }
        let int = |key: &str, default: usize, lo: i64, hi: i64| -> Result<usize, LearnError> {
            match self.hyperparameters.get(key) {
                None => Ok(default),
                Some(v) => match v.as_int() {
                    Some(i) if (lo..=hi).contains(&i) => Ok(i as usize),
                    _ => Err(LearnError::BadHyperparameter(format!("{key}={v} outside [{lo}, {hi}]"))),
                },
            }
        };
        let tree = |min_leaf_default: usize| -> Result<TreeParams, LearnError> {
            let max_depth = match self.hyperparameters.get("max_depth") {
                None => None,
                Some(_) => Some(int("max_depth", 0, 1, 1000)?),
            };
            Ok(TreeParams { min_leaf: int("min_leaf", min_leaf_default, 1, 1_000_000)?, max_depth })
        };
        Ok(match self.kind {
            ClassifierKind::Nb => Params::Nb,
            ClassifierKind::Tree => Params::Tree(tree(2)?),
            ClassifierKind::Rf => Params::Rf(ForestParams {
                n_trees: int("n_trees", 100, 1, 10_000)?,
                mtry: int("mtry", 6, 1, FEATURE_DIM as i64)?,
                tree: tree(1)?,
            }),
            ClassifierKind::Knn => {
                let weighting = match self.hyperparameters.get("weighting") {
                    None => Weighting::Uniform,
                    Some(Scalar::Text(t)) if t == "uniform" => Weighting::Uniform,
                    Some(Scalar::Text(t)) if t == "inverse-distance" => Weighting::InverseDistance,
                    Some(v) => {
                        return Err(LearnError::BadHyperparameter(format!(
                            "weighting={v}, expected uniform or inverse-distance"
                        )))
                    }
                };
                Params::Knn(KnnParams { k: int("k", 1, 1, 100_000)?, weighting })
            }
        })
    }
}
