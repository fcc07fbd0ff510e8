//! Synthetic recordings with known repetition boundaries and quality labels.

mod config;
pub mod presets;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    AmplitudeRule, ChannelWave, ClassEffect, ExerciseTemplate, Harmonic, Jitter, QualityModel, SynthConfig,
};

use crate::model::{interval_iou, ChannelId, Modality, QualityLabel, Recording, RecordingMeta, Segment};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("bad-config: {0}")]
    BadConfig(String),
    #[error("unknown-exercise: no template named {0:?}")]
    UnknownExercise(String),
    #[error("bad-error-score: {0} is not a non-negative finite number")]
    BadErrorScore(f64),
}

/// Ground-truth record of one generated repetition. `t_end_ms` is exclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthEvent {
    pub recording_id: String,
    pub index: usize,
    pub t_start_ms: f64,
    pub t_end_ms: f64,
    pub exercise: String,
    pub quality: QualityLabel,
    pub error_points: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesized {
    pub recording: Recording,
    pub events: Vec<TruthEvent>,
}

/// Maps accumulated error points to a quality class: one class per point,
/// halves rounded up, capped at 5.
pub fn label_from_errors(points: f64) -> Result<QualityLabel, SynthError> {
    if !(points >= 0.0 && points.is_finite()) {
        return Err(SynthError::BadErrorScore(points));
    }
    let r = (1.0 + points + 0.5).floor().clamp(1.0, 5.0) as u8;
    Ok(QualityLabel::new(r).expect("clamped to 1..=5"))
}

struct PlannedRep {
    start: usize,
    len: usize,
    points: f64,
    quality: QualityLabel,
    amplitudes: BTreeMap<ChannelId, f64>,
    rotation_noise: f64,
}

fn unit_jitter(rng: &mut ChaCha8Rng, pct: f64) -> f64 {
    1.0 + pct * (2.0 * rng.random::<f64>() - 1.0)
}

/// Generates one recording from `cfg`. The same config always yields the
/// same samples and events.
pub fn generate(cfg: &SynthConfig) -> Result<Synthesized, SynthError> {
    cfg.validate()?;
    let template = cfg.template()?;
    let fs = cfg.sample_rate_hz;
    let to_samples = |ms: f64| (ms * fs / 1000.0).round() as usize;
    let period_ms = cfg.period_ms()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let steps = (cfg.max_error_points / 0.5).floor() as u64;
    let lead = to_samples(cfg.lead_ms);
    let rest = to_samples(cfg.rest_ms);
    let mut cursor = lead;
    let mut reps = Vec::with_capacity(cfg.sets * cfg.reps_per_set);
    for set in 0..cfg.sets {
        if set > 0 {
            cursor += rest;
        }
        for _ in 0..cfg.reps_per_set {
            let points = 0.5 * rng.random_range(0..=steps) as f64;
            let quality = label_from_errors(points)?;
            let effect = &cfg.quality_model.0[quality.get() as usize - 1];
            let len =
                to_samples(period_ms * effect.period_factor * unit_jitter(&mut rng, cfg.jitter.period_pct)).max(4);
            let amplitudes = template
                .channels
                .iter()
                .map(|(&c, w)| {
                    let a = w.amplitude * effect.amplitude_factor(c) * unit_jitter(&mut rng, cfg.jitter.amplitude_pct);
                    (c, a)
                })
                .collect();
            reps.push(PlannedRep {
                start: cursor,
                len,
                points,
                quality,
                amplitudes,
                rotation_noise: effect.rotation_noise,
            });
            cursor += len;
        }
    }
    let n = cursor + lead;

    let mut channels: BTreeMap<ChannelId, Vec<f64>> = ChannelId::ALL.iter().map(|&c| (c, vec![0.0; n])).collect();
    // noise scale per sample: rest level outside repetitions
    let mut noise_scale = vec![cfg.rest_noise_factor; n];
    let mut rot_scale = vec![cfg.rest_noise_factor; n];
    for rep in &reps {
        for (&c, &amp) in &rep.amplitudes {
            let wave = &template.channels[&c];
            let xs = channels.get_mut(&c).expect("all channels allocated");
            for j in 0..rep.len {
                let theta = 2.0 * PI * j as f64 / rep.len as f64;
                xs[rep.start + j] = amp * wave.shape(theta);
            }
        }
        noise_scale[rep.start..rep.start + rep.len].fill(1.0);
        rot_scale[rep.start..rep.start + rep.len].fill(rep.rotation_noise);
    }

    if cfg.noise_sigma > 0.0 {
        for (c, xs) in channels.iter_mut() {
            let scale = if c.modality == Modality::Rot { &rot_scale } else { &noise_scale };
            for (x, s) in xs.iter_mut().zip(scale) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *x += cfg.noise_sigma * s * z;
            }
        }
    }

    let expected = cfg.spurious_peak_rate * n as f64 / fs;
    if expected > 0.0 && n >= 3 {
        let count = Poisson::new(expected).map_err(|e| SynthError::BadConfig(e.to_string()))?.sample(&mut rng) as usize;
        for _ in 0..count {
            let at = rng.random_range(1..n - 1);
            let c = ChannelId::ALL[rng.random_range(0..ChannelId::ALL.len())];
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let height = sign * cfg.spurious_peak_amplitude * template.channels.get(&c).map_or(1.0, |w| w.amplitude);
            let xs = channels.get_mut(&c).expect("all channels allocated");
            xs[at - 1] += 0.5 * height;
            xs[at] += height;
            xs[at + 1] += 0.5 * height;
        }
    }

    let t_ms = |i: usize| i as f64 * 1000.0 / fs;
    let events = reps
        .iter()
        .enumerate()
        .map(|(index, r)| TruthEvent {
            recording_id: cfg.recording_id.clone(),
            index,
            t_start_ms: t_ms(r.start),
            t_end_ms: t_ms(r.start + r.len),
            exercise: cfg.exercise.clone(),
            quality: r.quality,
            error_points: r.points,
        })
        .collect();
    let recording = Recording {
        id: cfg.recording_id.clone(),
        sample_rate_hz: fs,
        channels,
        meta: RecordingMeta {
            subject_id: cfg.subject_id.clone(),
            exercise: cfg.exercise.clone(),
            set_id: cfg.set_id.clone(),
        },
    };
    Ok(Synthesized { recording, events })
}

/// Pairing of ground-truth events with extracted segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchReport {
    /// For each truth event, the best-overlapping segment of the same
    /// recording and its IoU, when that IoU reaches the threshold.
    pub matches: Vec<Option<(usize, f64)>>,
    pub min_iou: f64,
}

impl MatchReport {
    pub fn matched(&self) -> usize {
        self.matches.iter().filter(|m| m.is_some()).count()
    }

    /// Fraction of truth events that were matched (1 when there are none).
    pub fn extraction_rate(&self) -> f64 {
        if self.matches.is_empty() {
            1.0
        } else {
            self.matched() as f64 / self.matches.len() as f64
        }
    }
}

pub fn match_events(truth: &[TruthEvent], segments: &[Segment], min_iou: f64) -> MatchReport {
    let matches = truth
        .iter()
        .map(|t| {
            segments
                .iter()
                .enumerate()
                .filter(|(_, s)| s.recording_id == t.recording_id)
                .map(|(i, s)| (i, interval_iou((s.t_start_ms, s.t_end_ms), (t.t_start_ms, t.t_end_ms))))
                .filter(|&(_, iou)| iou >= min_iou)
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        })
        .collect();
    MatchReport { matches, min_iou }
}
