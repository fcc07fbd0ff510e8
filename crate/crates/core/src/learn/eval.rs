use std::time::Instant;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train_raw, ClassifierSpec, LearnError};
use crate::features::Dataset;

/// Counts with rows = truth and columns = prediction, both in class-set order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_indices(classes: Vec<String>, truth: &[usize], pred: &[usize]) -> Self {
        let n = classes.len();
        let mut counts = vec![vec![0u64; n]; n];
        for (&t, &p) in truth.iter().zip(pred) {
            counts[t][p] += 1;
        }
        ConfusionMatrix { classes, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.trace() as f64 / t as f64,
        }
    }

    /// Share of class `i`'s instances predicted correctly; `None` for an absent class.
    pub fn class_rate(&self, i: usize) -> Option<f64> {
        let row: u64 = self.counts[i].iter().sum();
        (row > 0).then(|| self.counts[i][i] as f64 / row as f64)
    }

    pub fn row_total(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }
}

pub fn confusion_matrix<S: AsRef<str>>(
    truth: &[S],
    pred: &[S],
    class_set: &[String],
) -> Result<ConfusionMatrix, LearnError> {
    if truth.len() != pred.len() {
        return Err(LearnError::LengthMismatch { truth: truth.len(), pred: pred.len() });
    }
    let index = |s: &S| {
        class_set.iter().position(|c| c == s.as_ref()).ok_or_else(|| LearnError::UnknownClass(s.as_ref().to_string()))
    };
    let t = truth.iter().map(index).collect::<Result<Vec<_>, _>>()?;
    let p = pred.iter().map(index).collect::<Result<Vec<_>, _>>()?;
    Ok(ConfusionMatrix::from_indices(class_set.to_vec(), &t, &p))
}

/// Fraction of misclassifications that land in a neighbouring ordinal class.
/// `None` when there are no errors or the class names are not integers.
pub fn adjacency_rate(m: &ConfusionMatrix) -> Option<f64> {
    let ranks: Vec<i64> = m.classes.iter().map(|c| c.parse().ok()).collect::<Option<_>>()?;
    let (mut errors, mut adjacent) = (0u64, 0u64);
    for (i, row) in m.counts.iter().enumerate() {
        for (j, &n) in row.iter().enumerate() {
            if i != j {
                errors += n;
                if (ranks[i] - ranks[j]).abs() == 1 {
                    adjacent += n;
                }
            }
        }
    }
    (errors > 0).then(|| adjacent as f64 / errors as f64)
}

/// Fold number of every instance. Each class is shuffled with `seed` and dealt
/// round-robin, the dealer position carrying over from class to class. When
/// some class has fewer than `k` instances the whole set is shuffled and dealt
/// instead.
pub fn stratified_folds(labels: &[usize], n_classes: usize, k: usize, seed: u64) -> Result<Vec<usize>, LearnError> {
    let n = labels.len();
    if k < 2 {
        return Err(LearnError::BadFolds(k));
    }
    if k > n {
        return Err(LearnError::TooManyFolds { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }
    let groups = if by_class.iter().any(|g| !g.is_empty() && g.len() < k) {
        warn!("a class has fewer than {k} instances, folds are not stratified");
        vec![(0..n).collect::<Vec<_>>()]
    } else {
        by_class
    };
    let mut folds = vec![0usize; n];
    let mut dealer = 0usize;
    for mut g in groups {
        g.shuffle(&mut rng);
        for i in g {
            folds[i] = dealer % k;
            dealer += 1;
        }
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub spec: ClassifierSpec,
    pub k: usize,
    pub seed: u64,
    pub fold_accuracies: Vec<f64>,
    /// Mean of the fold accuracies.
    pub mean_accuracy: f64,
    /// Accuracy over all pooled test predictions (trace / total).
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    /// Out-of-fold predicted class index of every instance.
    pub predictions: Vec<usize>,
    /// Wall-clock training time summed over folds.
    pub training_ms: f64,
}

impl EvaluationReport {
    /// Copy with the machine-dependent timing zeroed, for byte comparisons.
    pub fn without_timings(&self) -> EvaluationReport {
        EvaluationReport { training_ms: 0.0, ..self.clone() }
    }
}

pub fn cross_validate(
    spec: &ClassifierSpec,
    ds: &Dataset,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport, LearnError> {
    spec.params()?;
    if ds.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let x = ds.values();
    let y = ds.class_indices();
    let folds = stratified_folds(&y, ds.class_set.len(), k, seed)?;
    let per_fold: Vec<(Vec<(usize, usize)>, f64)> = (0..k)
        .into_par_iter()
        .map(|f| {
            let (train_x, train_y): (Vec<_>, Vec<_>) =
                (0..x.len()).filter(|&i| folds[i] != f).map(|i| (x[i], y[i])).unzip();
            let started = Instant::now();
            let model = train_raw(spec, &train_x, &train_y, ds.target, &ds.class_set)?;
            let ms = started.elapsed().as_secs_f64() * 1000.0;
            let preds = (0..x.len())
                .filter(|&i| folds[i] == f)
                .map(|i| model.predict_values(&x[i]).map(|p| (i, p.class_index)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((preds, ms))
        })
        .collect::<Result<_, LearnError>>()?;

    let mut predictions = vec![0usize; x.len()];
    let mut fold_accuracies = Vec::with_capacity(k);
    let mut training_ms = 0.0;
    for (preds, ms) in &per_fold {
        let correct = preds.iter().filter(|&&(i, p)| y[i] == p).count();
        fold_accuracies.push(correct as f64 / preds.len() as f64);
        for &(i, p) in preds {
            predictions[i] = p;
        }
        training_ms += ms;
    }
    let confusion = ConfusionMatrix::from_indices(ds.class_set.clone(), &y, &predictions);
    Ok(EvaluationReport {
        spec: spec.clone(),
        k,
        seed,
        mean_accuracy: fold_accuracies.iter().sum::<f64>() / k as f64,
        accuracy: confusion.accuracy(),
        fold_accuracies,
        confusion,
        predictions,
        training_ms,
    })
}
