//! Dynamic, multi-peak segmentation of a recording into individual motion
//! events of individual length.
//!
//! Decisions are taken on a single reference channel: it is low-pass filtered
//! hard enough that only the repetition rhythm survives, the event length is
//! estimated from its autocorrelation, and each event is located by matching
//! an ordered extrema pattern inside a growing window. Boundaries sit on zero
//! crossings. The final cut is applied to every channel of a lightly smoothed
//! copy of the recording.

use std::collections::BTreeMap;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::{
    self, design_lowpass, estimate_period, filter_zero_phase, find_extrema, zero_crossing, Direction, DspError,
    ExtremumEvent, ExtremumKind, FilterSpec, PeriodEstimate,
};
use crate::model::{validate_recording, ChannelId, Recording, Segment, SegmentData, Violation};

/// Recommended cutoff-factor band for the segmentation filter.
pub const RECOMMENDED_CF: (f64, f64) = (0.0065, 0.025);

/// Ordered extrema kinds that make up one repetition on the reference channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtremaPattern(pub Vec<ExtremumKind>);

impl ExtremaPattern {
    pub fn new(kinds: Vec<ExtremumKind>) -> Self {
        ExtremaPattern(kinds)
    }

    pub fn kinds(&self) -> &[ExtremumKind] {
        &self.0
    }
}

impl Default for ExtremaPattern {
    fn default() -> Self {
        ExtremaPattern(vec![ExtremumKind::Min, ExtremumKind::Max])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmenterConfig {
    /// Segmentation filter corner as a fraction of the sample rate.
    pub cutoff_factor: f64,
    pub filter_order: usize,
    pub pattern: ExtremaPattern,
    /// Window growth step; `None` means 5% of the estimated event length.
    pub growth_length_ms: Option<f64>,
    pub period_window_ms: (f64, f64),
    pub reference_override: Option<ChannelId>,
    /// Corner factor of the light smoothing applied before extraction.
    pub smoothing_cf: f64,
    /// Extrema below `min_prominence_factor * std(filtered reference)` are ignored.
    pub min_prominence_factor: f64,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            cutoff_factor: 0.012,
            filter_order: 4,
            pattern: ExtremaPattern::default(),
            growth_length_ms: None,
            period_window_ms: (300.0, 5000.0),
            reference_override: None,
            smoothing_cf: 0.1,
            min_prominence_factor: 0.3,
        }
    }
}

impl SegmenterConfig {
    /// Shipped settings for the six study exercises. Unknown names get the defaults.
    pub fn preset(exercise: &str) -> SegmenterConfig {
        use crate::model::{Axis, Modality, Position};
        use ExtremumKind::{Max, Min};
        let mut cfg = SegmenterConfig::default();
        match exercise {
            "mountain_climber" => cfg.pattern = ExtremaPattern(vec![Min, Max, Min, Max]),
            "bicycle_crunch" => {
                cfg.reference_override = Some(ChannelId::new(Position::BL, Modality::Acc, Axis::X));
            }
            _ => {}
        }
        cfg
    }

    /// Checks the configuration; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, SegmentationError> {
        let bad = |m: String| Err(SegmentationError::BadConfig(m));
        if !(self.cutoff_factor > 0.0 && self.cutoff_factor < 0.5) {
            return bad(format!("cutoff_factor {} must lie in (0, 0.5)", self.cutoff_factor));
        }
        if !(self.smoothing_cf > self.cutoff_factor && self.smoothing_cf < 0.5) {
            return bad(format!(
                "smoothing_cf {} must lie in (cutoff_factor, 0.5) = ({}, 0.5)",
                self.smoothing_cf, self.cutoff_factor
            ));
        }
        if self.filter_order == 0 || !self.filter_order.is_multiple_of(2) {
            return bad(format!("filter_order {} must be positive and even", self.filter_order));
        }
        if self.pattern.0.is_empty() {
            return bad("pattern must hold at least one extremum".into());
        }
        if let Some(l) = self.growth_length_ms {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("growth_length_ms {l} must be positive"));
            }
        }
        let (lo, hi) = self.period_window_ms;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return bad(format!("period_window_ms ({lo}, {hi}) must satisfy 0 < min < max"));
        }
        if !(self.min_prominence_factor >= 0.0 && self.min_prominence_factor.is_finite()) {
            return bad(format!("min_prominence_factor {} must be non-negative", self.min_prominence_factor));
        }
        let mut warnings = Vec::new();
        if self.cutoff_factor < RECOMMENDED_CF.0 || self.cutoff_factor > RECOMMENDED_CF.1 {
            warnings.push(format!(
                "cutoff_factor {} is outside the recommended band [{}, {}]",
                self.cutoff_factor, RECOMMENDED_CF.0, RECOMMENDED_CF.1
            ));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegmentationError {
    #[error("invalid recording: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidRecording(Vec<Violation>),
    #[error("bad segmenter config: {0}")]
    BadConfig(String),
    #[error("unsegmentable-recording: {0}")]
    Unsegmentable(DspError),
    #[error("segment-out-of-range: segment {index} [{t_start_ms}, {t_end_ms}] ms is outside the recording")]
    SegmentOutOfRange { index: usize, t_start_ms: f64, t_end_ms: f64 },
    #[error(transparent)]
    Dsp(#[from] DspError),
}

/// Channel with the largest population standard deviation, or the override.
/// Ties go to the channel earlier in canonical order.
pub fn select_reference_channel(rec: &Recording, override_channel: Option<ChannelId>) -> ChannelId {
    if let Some(c) = override_channel {
        return c;
    }
    let mut best = ChannelId::ALL[0];
    let mut best_std = f64::NEG_INFINITY;
    for c in ChannelId::ALL {
        let s = dsp::std_dev(rec.channel(c)).unwrap_or(0.0);
        if s > best_std {
            best = c;
            best_std = s;
        }
    }
    best
}

/// True iff the pattern occurs in order (not necessarily contiguously) in
/// the kinds of `extrema`.
pub fn window_matches_pattern(extrema: &[ExtremumEvent], pattern: &ExtremaPattern) -> bool {
    match_pattern(extrema, pattern.kinds()).is_some()
}

/// Greedy earliest in-order match; returns the position of the event that
/// completes the pattern.
fn match_pattern(extrema: &[ExtremumEvent], pattern: &[ExtremumKind]) -> Option<usize> {
    if pattern.is_empty() {
        return None;
    }
    let mut want = 0;
    for (i, e) in extrema.iter().enumerate() {
        if e.kind == pattern[want] {
            want += 1;
            if want == pattern.len() {
                return Some(i);
            }
        }
    }
    None
}

/// Everything `segment_recording` computed on the way, for plotting and
/// diagnostics.
#[derive(Debug, Clone)]
pub struct SegmentationTrace {
    pub reference: ChannelId,
    /// Mean-removed reference after the segmentation low-pass.
    pub filtered: Vec<f64>,
    /// Mean-removed reference after the light smoothing.
    pub smoothed: Vec<f64>,
    pub period: PeriodEstimate,
    pub min_prominence: f64,
    pub extrema: Vec<ExtremumEvent>,
    /// Half-open sample ranges of the emitted segments.
    pub bounds: Vec<(usize, usize)>,
    pub segments: Vec<Segment>,
    /// Candidate onsets whose window never matched the pattern.
    pub discarded: usize,
}

pub fn segment_recording(rec: &Recording, config: &SegmenterConfig) -> Result<Vec<Segment>, SegmentationError> {
    segment_recording_traced(rec, config).map(|t| t.segments)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn polarity(kind: ExtremumKind) -> f64 {
    match kind {
        ExtremumKind::Max => 1.0,
        ExtremumKind::Min => -1.0,
    }
}

pub fn segment_recording_traced(
    rec: &Recording,
    config: &SegmenterConfig,
) -> Result<SegmentationTrace, SegmentationError> {
    let violations = validate_recording(rec);
    if !violations.is_empty() {
        return Err(SegmentationError::InvalidRecording(violations));
    }
    for w in config.validate()? {
        warn!("{w}");
    }
    let fs = rec.sample_rate_hz;
    let reference = select_reference_channel(rec, config.reference_override);
    let raw = rec.channel(reference);
    let (mean, _) = dsp::mean_and_std(raw)?;
    let x: Vec<f64> = raw.iter().map(|v| v - mean).collect();

    let seg_filter = design_lowpass(&FilterSpec::new(config.filter_order, fs, config.cutoff_factor))?;
    let smooth_filter = design_lowpass(&FilterSpec::new(config.filter_order, fs, config.smoothing_cf))?;
    let xf = filter_zero_phase(&seg_filter, &x)?;
    let xs = filter_zero_phase(&smooth_filter, &x)?;

    let (lo, hi) = config.period_window_ms;
    let period = estimate_period(&xf, fs, lo, hi).map_err(|e| match e {
        DspError::NoPeriodicity { .. } | DspError::ConstantSignal => SegmentationError::Unsegmentable(e),
        other => SegmentationError::Dsp(other),
    })?;

    let xf_std = dsp::std_dev(&xf)?;
    let xs_floor = config.min_prominence_factor * dsp::std_dev(&xs)?;
    let min_prominence = config.min_prominence_factor * xf_std;
    let extrema = find_extrema(&xf, min_prominence);

    let n = xf.len();
    let pattern = config.pattern.kinds();
    let period_len = period.lag_samples;
    let growth_ms = config.growth_length_ms.unwrap_or(0.05 * period.period_ms);
    let growth = ((growth_ms * fs / 1000.0).round() as usize).max(1);
    let max_len = 2 * period_len;
    let radius = (period_len / 10).max(2);
    let first_sign = polarity(pattern[0]);
    let last_sign = polarity(pattern[pattern.len() - 1]);

    let mut bounds: Vec<(usize, usize)> = Vec::new();
    let mut discarded = 0;
    let mut resume = 0usize;
    let mut cursor = 0usize;

    while let Some(offset) = extrema[cursor..].iter().position(|e| e.index >= resume && e.kind == pattern[0]) {
        let c = cursor + offset;
        cursor = c + 1;
        let onset = extrema[c].index;

        // origin: zero crossing at or before the first pattern extremum
        let Ok(lobe_start) = zero_crossing(&xf, onset, Direction::Backward) else {
            discarded += 1;
            continue;
        };
        let coarse_start = lobe_start.max(resume);

        // window of the estimated length, grown by `growth` until the pattern fits
        let mut len = period_len;
        let matched = loop {
            let end = (coarse_start + len).min(n);
            let upto = extrema[c..].partition_point(|e| e.index < end);
            if let Some(m) = match_pattern(&extrema[c..c + upto], pattern) {
                break Some((end, extrema[c + m].index));
            }
            if len >= max_len || end >= n {
                break None;
            }
            len = (len + growth).min(max_len);
        };
        let Some((window_end, last_extremum)) = matched else {
            discarded += 1;
            continue;
        };

        // terminus: wind forward while still inside the final lobe, else wind back
        let last = window_end - 1;
        let s = sign(xf[last]);
        let coarse_end = if s == 0.0 {
            last
        } else if s == last_sign {
            zero_crossing(&xf, last, Direction::Forward).map_or(n, |i| i + 1)
        } else {
            zero_crossing(&xf, last, Direction::Backward).unwrap_or(last)
        };
        let coarse_end = coarse_end.max(last_extremum + 1);

        let start = snap_start(&xs, coarse_start, onset, first_sign, xs_floor, radius).max(resume);
        let end = snap_end(&xs, coarse_end, last_extremum, last_sign, xs_floor, radius);
        if end <= start + 1 {
            discarded += 1;
            continue;
        }
        bounds.push((start, end));
        resume = end;
    }

    let segments = bounds
        .iter()
        .enumerate()
        .map(|(index, &(s, e))| Segment {
            recording_id: rec.id.clone(),
            index,
            t_start_ms: rec.t_ms(s),
            t_end_ms: rec.t_ms(e),
        })
        .collect();
    Ok(SegmentationTrace {
        reference,
        filtered: xf,
        smoothed: xs,
        period,
        min_prominence,
        extrema,
        bounds,
        segments,
        discarded,
    })
}

/// Moves a start boundary onto the zero crossing of the lightly smoothed
/// reference that opens the first pattern lobe.
///
/// The low-pass used for segmentation smears events into adjacent rest
/// periods, which displaces its crossings outward at the edges of a set. The
/// anchor is the first sample within `radius` of the coarse start whose
/// smoothed value clearly has the lobe's sign; the crossing is searched
/// backward from there.
fn snap_start(xs: &[f64], coarse: usize, onset: usize, lobe_sign: f64, floor: f64, radius: usize) -> usize {
    let lo = coarse.saturating_sub(radius);
    let Some(anchor) = (lo..=onset).find(|&i| xs[i] * lobe_sign >= floor) else {
        return coarse;
    };
    match zero_crossing(xs, anchor, Direction::Backward) {
        Ok(i) if i >= lo && i <= coarse + radius => i,
        _ => coarse,
    }
}

/// Counterpart of [`snap_start`] for the closing lobe.
fn snap_end(xs: &[f64], coarse: usize, last_extremum: usize, lobe_sign: f64, floor: f64, radius: usize) -> usize {
    let hi = (coarse + radius).min(xs.len() - 1);
    let Some(anchor) = (last_extremum..=hi).rev().find(|&i| xs[i] * lobe_sign >= floor) else {
        return coarse;
    };
    match zero_crossing(xs, anchor, Direction::Forward) {
        Ok(i) if i < hi && i + 1 + radius >= coarse => i + 1,
        _ => coarse,
    }
}

/// Cuts every channel of the lightly smoothed recording at the segment
/// boundaries. Smoothing happens once per channel.
pub fn extract_segment_data(
    rec: &Recording,
    segments: &[Segment],
    config: &SegmenterConfig,
) -> Result<Vec<SegmentData>, SegmentationError> {
    if segments.is_empty() {
        return Ok(Vec::new());
    }
    let violations = validate_recording(rec);
    if !violations.is_empty() {
        return Err(SegmentationError::InvalidRecording(violations));
    }
    let n = rec.len();
    let duration_ms = rec.t_ms(n);
    let ranges = segments
        .iter()
        .map(|s| {
            let out_of_range = || SegmentationError::SegmentOutOfRange {
                index: s.index,
                t_start_ms: s.t_start_ms,
                t_end_ms: s.t_end_ms,
            };
            if !(s.t_start_ms >= 0.0 && s.t_end_ms > s.t_start_ms && s.t_end_ms <= duration_ms + 1e-6) {
                return Err(out_of_range());
            }
            let a = rec.index_at(s.t_start_ms);
            let b = rec.index_at(s.t_end_ms).min(n);
            if b <= a {
                return Err(out_of_range());
            }
            Ok((a, b))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let filter = design_lowpass(&FilterSpec::new(config.filter_order, rec.sample_rate_hz, config.smoothing_cf))?;
    let smoothed: BTreeMap<ChannelId, Vec<f64>> = ChannelId::ALL
        .par_iter()
        .map(|&c| filter_zero_phase(&filter, rec.channel(c)).map(|v| (c, v)))
        .collect::<Result<_, _>>()?;

    Ok(segments
        .iter()
        .zip(ranges)
        .map(|(s, (a, b))| SegmentData {
            segment: s.clone(),
            sample_rate_hz: rec.sample_rate_hz,
            channels: smoothed.iter().map(|(&c, v)| (c, v[a..b].to_vec())).collect(),
        })
        .collect())
}
