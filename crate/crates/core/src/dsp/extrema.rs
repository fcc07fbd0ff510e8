use serde::{Deserialize, Serialize};

use super::DspError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumEvent {
    pub index: usize,
    pub kind: ExtremumKind,
    pub prominence: f64,
}

/// Local maxima of `x` as plateau midpoints; plateaus touching either end
/// are not maxima.
fn local_maxima(x: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let mut i = 1;
    while i < n - 1 {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < n - 1 && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                out.push((i + ahead - 1) / 2);
            }
            i = ahead;
        } else {
            i += 1;
        }
    }
    out
}

/// Topographic prominence of the maximum at `peak`.
fn prominence(x: &[f64], peak: usize) -> f64 {
    let h = x[peak];
    let mut left_min = h;
    for &v in x[..peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[peak + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// All local minima and maxima whose prominence is at least `min_prominence`,
/// ascending by index.
///
/// With a positive threshold consecutive events alternate in kind. Equal-height
/// neighbours can still produce two events of the same kind in a row; such a
/// run is collapsed to its most extreme member (the first one on ties).
pub fn find_extrema(x: &[f64], min_prominence: f64) -> Vec<ExtremumEvent> {
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let mut events: Vec<ExtremumEvent> = local_maxima(x)
        .into_iter()
        .map(|i| ExtremumEvent { index: i, kind: ExtremumKind::Max, prominence: prominence(x, i) })
        .chain(local_maxima(&neg).into_iter().map(|i| ExtremumEvent {
            index: i,
            kind: ExtremumKind::Min,
            prominence: prominence(&neg, i),
        }))
        .filter(|e| e.prominence >= min_prominence)
        .collect();
    events.sort_by_key(|e| e.index);
    if min_prominence <= 0.0 {
        return events;
    }
    let mut out: Vec<ExtremumEvent> = Vec::with_capacity(events.len());
    for e in events {
        match out.last_mut() {
            Some(last) if last.kind == e.kind => {
                let more_extreme = match e.kind {
                    ExtremumKind::Max => x[e.index] > x[last.index],
                    ExtremumKind::Min => x[e.index] < x[last.index],
                };
                if more_extreme {
                    *last = e;
                }
            }
            _ => out.push(e),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Nearest zero crossing from `from_index` in the given direction.
///
/// Returns the sample on the near side of the crossing: the index `i` for
/// which `x[i]` is zero or differs in sign from the next sample in the
/// search direction.
pub fn zero_crossing(x: &[f64], from_index: usize, direction: Direction) -> Result<usize, DspError> {
    if from_index >= x.len() {
        return Err(DspError::BadArgument(format!("from_index {from_index} outside a signal of {} samples", x.len())));
    }
    match direction {
        Direction::Forward => {
            (from_index..x.len()).find(|&i| x[i] == 0.0 || (i + 1 < x.len() && sign(x[i]) != sign(x[i + 1])))
        }
        Direction::Backward => (0..=from_index).rev().find(|&i| x[i] == 0.0 || (i > 0 && sign(x[i]) != sign(x[i - 1]))),
    }
    .ok_or(DspError::NoZeroCrossing)
}
