use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::presets;
use super::SynthError;
use crate::model::{Axis, ChannelId, Modality, Position};

/// One sinusoidal component of a repetition waveform: `weight * sin(order * theta + phase)`
/// with `theta` running from 0 to 2π over the repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub order: u32,
    pub weight: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelWave {
    pub amplitude: f64,
    pub harmonics: Vec<Harmonic>,
}

impl ChannelWave {
    /// Value at repetition phase `theta` (radians), before amplitude scaling.
    pub fn shape(&self, theta: f64) -> f64 {
        self.harmonics.iter().map(|h| h.weight * (h.order as f64 * theta + h.phase).sin()).sum()
    }

    /// RMS over one repetition including the amplitude.
    pub fn rms(&self) -> f64 {
        // orthogonal harmonics of distinct order: each contributes weight^2 / 2
        let mut by_order: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        for h in &self.harmonics {
            let e = by_order.entry(h.order).or_default();
            e.0 += h.weight * h.phase.cos();
            e.1 += h.weight * h.phase.sin();
        }
        let power: f64 = by_order.values().map(|(c, s)| (c * c + s * s) / 2.0).sum();
        self.amplitude * power.sqrt()
    }
}

/// Per-channel waveforms of one exercise. Channels not listed carry noise only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExerciseTemplate {
    pub period_ms: f64,
    pub channels: BTreeMap<ChannelId, ChannelWave>,
}

impl ExerciseTemplate {
    /// Channel with the largest waveform RMS (canonical order on ties).
    pub fn dominant_channel(&self) -> Option<ChannelId> {
        let mut best: Option<(ChannelId, f64)> = None;
        for (&c, w) in &self.channels {
            let r = w.rms();
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((c, r));
            }
        }
        best.map(|(c, _)| c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Jitter {
    /// Relative half-width of the uniform repetition-length jitter.
    pub period_pct: f64,
    /// Relative half-width of the uniform per-channel amplitude jitter.
    pub amplitude_pct: f64,
}

impl Default for Jitter {
    fn default() -> Self {
        Jitter { period_pct: 0.1, amplitude_pct: 0.1 }
    }
}

/// Multiplies the amplitude of every channel matching all given selectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeRule {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positions: Vec<Position>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modality: Option<Modality>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    pub factor: f64,
}

impl AmplitudeRule {
    pub fn matches(&self, c: ChannelId) -> bool {
        (self.positions.is_empty() || self.positions.contains(&c.position))
            && self.modality.is_none_or(|m| m == c.modality)
            && self.axis.is_none_or(|a| a == c.axis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEffect {
    #[serde(default)]
    pub amplitude: Vec<AmplitudeRule>,
    /// Multiplier on `noise_sigma` for rotation channels during a repetition.
    #[serde(default = "one")]
    pub rotation_noise: f64,
    /// Multiplier on the repetition length (1 leaves the period unchanged).
    #[serde(default = "one")]
    pub period_factor: f64,
}

fn one() -> f64 {
    1.0
}

impl ClassEffect {
    pub fn amplitude_factor(&self, c: ChannelId) -> f64 {
        self.amplitude.iter().filter(|r| r.matches(c)).map(|r| r.factor).product()
    }
}

/// Effects of quality classes 1..=5, index 0 holding class 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QualityModel(pub [ClassEffect; 5]);

impl Default for QualityModel {
    fn default() -> Self {
        presets::default_quality_model()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub recording_id: String,
    pub subject_id: String,
    pub set_id: String,
    /// Key into `exercise_templates`.
    pub exercise: String,
    pub exercise_templates: BTreeMap<String, ExerciseTemplate>,
    pub reps_per_set: usize,
    pub sets: usize,
    pub rest_ms: f64,
    /// Quiet span before the first and after the last repetition.
    pub lead_ms: f64,
    /// Overrides the template's repetition length when set.
    pub base_period_ms: Option<f64>,
    pub jitter: Jitter,
    pub quality_model: QualityModel,
    /// Error points are drawn uniformly from `{0, 0.5, ..., max_error_points}`.
    pub max_error_points: f64,
    /// Std of the additive Gaussian noise during repetitions.
    pub noise_sigma: f64,
    /// Noise during rests and lead spans, relative to `noise_sigma`.
    pub rest_noise_factor: f64,
    /// Expected spurious peaks per second of recording.
    pub spurious_peak_rate: f64,
    /// Spurious peak height relative to the hit channel's amplitude.
    pub spurious_peak_amplitude: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            recording_id: "synth".into(),
            subject_id: "synthetic".into(),
            set_id: "1".into(),
            exercise: "lunge".into(),
            exercise_templates: presets::exercise_templates(),
            reps_per_set: 20,
            sets: 3,
            rest_ms: 30_000.0,
            lead_ms: 2_000.0,
            base_period_ms: None,
            jitter: Jitter::default(),
            quality_model: QualityModel::default(),
            max_error_points: 4.0,
            noise_sigma: 0.0,
            rest_noise_factor: 0.3,
            spurious_peak_rate: 0.0,
            spurious_peak_amplitude: 1.0,
            sample_rate_hz: 100.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn template(&self) -> Result<&ExerciseTemplate, SynthError> {
        self.exercise_templates.get(&self.exercise).ok_or_else(|| SynthError::UnknownExercise(self.exercise.clone()))
    }

    pub fn period_ms(&self) -> Result<f64, SynthError> {
        Ok(self.base_period_ms.unwrap_or(self.template()?.period_ms))
    }

    /// Sets `noise_sigma` so that the dominant channel's waveform power is
    /// `snr` times the noise power.
    pub fn with_snr(mut self, snr: f64) -> Result<Self, SynthError> {
        let t = self.template()?;
        let rms = t.dominant_channel().map_or(0.0, |c| t.channels[&c].rms());
        self.noise_sigma = rms / snr.sqrt();
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::BadConfig(m));
        let t = self.template()?;
        if self.reps_per_set < 1 || self.sets < 1 {
            return bad("reps_per_set and sets must be at least 1".into());
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return bad(format!("sample_rate_hz {} must be positive", self.sample_rate_hz));
        }
        let period = self.period_ms()?;
        if !(period > 0.0 && period.is_finite()) {
            return bad(format!("repetition length {period} ms must be positive"));
        }
        for (name, v) in [("period_pct", self.jitter.period_pct), ("amplitude_pct", self.jitter.amplitude_pct)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("jitter.{name} {v} must lie in [0, 1]"));
            }
        }
        for (name, v) in [
            ("rest_ms", self.rest_ms),
            ("lead_ms", self.lead_ms),
            ("noise_sigma", self.noise_sigma),
            ("rest_noise_factor", self.rest_noise_factor),
            ("spurious_peak_rate", self.spurious_peak_rate),
            ("spurious_peak_amplitude", self.spurious_peak_amplitude),
            ("max_error_points", self.max_error_points),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} {v} must be non-negative"));
            }
        }
        for (r, effect) in self.quality_model.0.iter().enumerate() {
            let positive = effect.rotation_noise > 0.0
                && effect.period_factor > 0.0
                && effect.amplitude.iter().all(|a| a.factor > 0.0);
            if !positive {
                return bad(format!("quality class {} has a non-positive multiplier", r + 1));
            }
        }
        for (c, w) in &t.channels {
            if w.harmonics.len() > 3 {
                return bad(format!("channel {c} has {} harmonics, at most 3 allowed", w.harmonics.len()));
            }
            if w.harmonics.iter().any(|h| h.order == 0) {
                return bad(format!("channel {c} has a harmonic of order 0"));
            }
        }
        Ok(())
    }
}
