//! Per-segment feature vectors and labeled datasets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::std_dev;
use crate::model::{ChannelId, QualityLabel, SegmentData};

/// Number of numeric components: one σ per channel plus the duration.
pub const FEATURE_DIM: usize = 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("empty-segment: channel {0} has no samples")]
    EmptySegment(ChannelId),
    #[error("empty-segment: channel {0} is missing")]
    MissingChannel(ChannelId),
    #[error("missing-label: row {row} has no {target} label")]
    MissingLabel { row: usize, target: Target },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Population σ of each channel, canonical channel order.
    pub stds: [f64; 30],
    pub delta_t_ms: f64,
    pub exercise: Option<String>,
    pub quality: Option<QualityLabel>,
}

impl FeatureVector {
    /// The 31 numeric components: the channel σs followed by the duration.
    pub fn values(&self) -> [f64; FEATURE_DIM] {
        let mut v = [0.0; FEATURE_DIM];
        v[..30].copy_from_slice(&self.stds);
        v[30] = self.delta_t_ms;
        v
    }

    pub fn label(&self, target: Target) -> Option<String> {
        match target {
            Target::Quality => self.quality.map(|q| q.to_string()),
            Target::Exercise => self.exercise.clone(),
        }
    }
}

/// A feature vector together with the size of the data it summarizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Featurized {
    pub vector: FeatureVector,
    pub raw_samples: usize,
}

impl Featurized {
    /// Raw samples per stored feature value.
    pub fn compression_ratio(&self) -> f64 {
        self.raw_samples as f64 / FEATURE_DIM as f64
    }
}

pub fn featurize(sd: &SegmentData) -> Result<Featurized, FeatureError> {
    let mut stds = [0.0; 30];
    for (slot, c) in stds.iter_mut().zip(ChannelId::ALL) {
        let xs = sd.channels.get(&c).ok_or(FeatureError::MissingChannel(c))?;
        *slot = std_dev(xs).map_err(|_| FeatureError::EmptySegment(c))?;
    }
    Ok(Featurized {
        vector: FeatureVector { stds, delta_t_ms: sd.segment.duration_ms(), exercise: None, quality: None },
        raw_samples: sd.raw_samples(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Quality,
    Exercise,
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Target::Quality => "quality",
            Target::Exercise => "exercise",
        })
    }
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quality" => Ok(Target::Quality),
            "exercise" => Ok(Target::Exercise),
            _ => Err(format!("unknown target {s:?}, expected quality or exercise")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub rows: Vec<FeatureVector>,
    pub target: Target,
    /// Sorted distinct labels.
    pub class_set: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn label(&self, row: usize) -> &str {
        match self.target {
            Target::Quality => self.class_set[self.class_index(row)].as_str(),
            Target::Exercise => self.rows[row].exercise.as_deref().expect("labeled at build time"),
        }
    }

    /// Position of row `row`'s label in `class_set`.
    pub fn class_index(&self, row: usize) -> usize {
        let label = self.rows[row].label(self.target).expect("labeled at build time");
        self.class_set.binary_search(&label).expect("class_set holds every label")
    }

    /// Class indices of all rows.
    pub fn class_indices(&self) -> Vec<usize> {
        (0..self.len()).map(|i| self.class_index(i)).collect()
    }

    pub fn values(&self) -> Vec<[f64; FEATURE_DIM]> {
        self.rows.iter().map(FeatureVector::values).collect()
    }

    /// Rows at `indices`, keeping this dataset's class set.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            target: self.target,
            class_set: self.class_set.clone(),
        }
    }
}

pub fn build_dataset(rows: Vec<FeatureVector>, target: Target) -> Result<Dataset, FeatureError> {
    let mut classes = BTreeSet::new();
    for (row, v) in rows.iter().enumerate() {
        classes.insert(v.label(target).ok_or(FeatureError::MissingLabel { row, target })?);
    }
    Ok(Dataset { rows, target, class_set: classes.into_iter().collect() })
}
