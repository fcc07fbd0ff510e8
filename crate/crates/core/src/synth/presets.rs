//! Six exercise templates and the default quality model.
//!
//! Each template has one dominant channel whose repetition starts with a
//! negative lobe and ends with a positive one, so repetitions begin and end
//! on zero crossings. Every waveform is built from sine terms only (phase 0
//! or π), which keeps all channels continuous across repetition boundaries.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::config::{AmplitudeRule, ChannelWave, ClassEffect, ExerciseTemplate, Harmonic, QualityModel};
use crate::model::{ChannelId, Modality, Position};

pub const EXERCISES: [&str; 6] = ["crunch", "lunge", "jumping_jack", "mountain_climber", "bicycle_crunch", "squat"];

fn h(order: u32, weight: f64) -> Harmonic {
    Harmonic { order, weight, phase: 0.0 }
}

fn flipped(order: u32, weight: f64) -> Harmonic {
    Harmonic { order, weight, phase: PI }
}

fn ch(name: &str) -> ChannelId {
    name.parse().expect("preset channel name")
}

/// Low-energy background motion on every channel the template does not set.
fn background(channels: &mut BTreeMap<ChannelId, ChannelWave>, level: f64) {
    for c in ChannelId::ALL {
        channels.entry(c).or_insert_with(|| {
            let i = c.index() as u32;
            let mut harmonics = vec![if i.is_multiple_of(2) { h(1, 1.0) } else { flipped(1, 1.0) }];
            if i.is_multiple_of(3) {
                harmonics.push(h(2, 0.4));
            }
            ChannelWave { amplitude: level * (0.6 + 0.1 * (i % 5) as f64), harmonics }
        });
    }
}

fn template(period_ms: f64, waves: &[(&str, f64, Vec<Harmonic>)]) -> ExerciseTemplate {
    let mut channels: BTreeMap<ChannelId, ChannelWave> = waves
        .iter()
        .map(|(name, amplitude, harmonics)| {
            (ch(name), ChannelWave { amplitude: *amplitude, harmonics: harmonics.clone() })
        })
        .collect();
    background(&mut channels, 0.3);
    ExerciseTemplate { period_ms, channels }
}

pub fn exercise_template(name: &str) -> Option<ExerciseTemplate> {
    let t = match name {
        "crunch" => template(
            2000.0,
            &[
                ("CH_acc_x", 3.0, vec![flipped(1, 1.0)]),
                ("CH_rot_y", 2.0, vec![flipped(1, 1.0), h(2, 0.3)]),
                ("TL_acc_z", 1.2, vec![h(1, 1.0)]),
                ("TR_acc_z", 1.2, vec![h(1, 1.0)]),
                ("TL_rot_x", 1.0, vec![flipped(1, 1.0), h(3, 0.2)]),
                ("TR_rot_x", 1.0, vec![flipped(1, 1.0), h(3, 0.2)]),
                ("BL_acc_z", 0.6, vec![h(1, 1.0)]),
                ("BR_acc_z", 0.6, vec![h(1, 1.0)]),
            ],
        ),
        "lunge" => template(
            2600.0,
            &[
                ("BL_acc_x", 3.0, vec![flipped(1, 1.0), flipped(2, 0.3)]),
                ("BR_acc_x", 2.4, vec![flipped(1, 1.0), h(2, 0.3)]),
                ("BL_acc_y", 1.6, vec![h(1, 1.0)]),
                ("BR_acc_y", 1.6, vec![flipped(1, 1.0)]),
                ("BL_acc_z", 1.2, vec![h(1, 1.0), h(2, 0.2)]),
                ("BR_acc_z", 1.2, vec![flipped(1, 1.0), h(2, 0.2)]),
                ("BL_rot_x", 1.8, vec![h(1, 1.0)]),
                ("BR_rot_x", 1.8, vec![flipped(1, 1.0)]),
                ("BL_rot_y", 1.0, vec![h(2, 1.0)]),
                ("BR_rot_y", 1.0, vec![flipped(2, 1.0)]),
                ("TL_acc_x", 1.4, vec![flipped(1, 1.0)]),
                ("TR_acc_x", 1.4, vec![flipped(1, 1.0)]),
                ("TL_acc_y", 1.1, vec![h(1, 1.0)]),
                ("TR_acc_y", 1.1, vec![h(1, 1.0)]),
                ("TL_rot_z", 0.8, vec![h(1, 1.0), h(3, 0.3)]),
                ("TR_rot_z", 0.8, vec![flipped(1, 1.0), h(3, 0.3)]),
            ],
        ),
        "jumping_jack" => template(
            1400.0,
            &[
                ("TL_acc_y", 3.0, vec![flipped(1, 1.0)]),
                ("TR_acc_y", 2.7, vec![flipped(1, 1.0)]),
                ("TL_rot_x", 1.2, vec![h(1, 1.0), h(2, 0.3)]),
                ("TR_rot_x", 1.2, vec![flipped(1, 1.0), h(2, 0.3)]),
                ("BL_acc_z", 1.6, vec![h(2, 1.0)]),
                ("BR_acc_z", 1.6, vec![h(2, 1.0)]),
                ("BL_acc_y", 1.0, vec![flipped(1, 1.0)]),
                ("BR_acc_y", 1.0, vec![h(1, 1.0)]),
                ("CH_acc_z", 1.4, vec![h(2, 1.0)]),
            ],
        ),
        // two strokes per repetition: min, max, min, max on the dominant channel
        "mountain_climber" => template(
            2400.0,
            &[
                ("BL_acc_x", 3.0, vec![flipped(1, 0.5), flipped(2, 1.0)]),
                ("BR_acc_x", 2.4, vec![flipped(1, 0.5), h(2, 1.0)]),
                ("BL_rot_y", 1.5, vec![h(1, 1.0)]),
                ("BR_rot_y", 1.5, vec![flipped(1, 1.0)]),
                ("CH_acc_z", 1.2, vec![h(2, 1.0)]),
                ("TL_acc_x", 0.9, vec![h(1, 1.0)]),
                ("TR_acc_x", 0.9, vec![flipped(1, 1.0)]),
            ],
        ),
        "bicycle_crunch" => template(
            2200.0,
            &[
                ("BL_acc_x", 3.2, vec![flipped(1, 1.0)]),
                ("BR_acc_x", 2.6, vec![h(1, 1.0)]),
                ("TL_rot_z", 1.6, vec![flipped(1, 1.0), h(2, 0.2)]),
                ("TR_rot_z", 1.6, vec![h(1, 1.0), h(2, 0.2)]),
                ("CH_rot_x", 1.4, vec![flipped(1, 1.0)]),
                ("CH_acc_y", 1.0, vec![h(2, 1.0)]),
            ],
        ),
        "squat" => template(
            2800.0,
            &[
                ("CH_acc_x", 3.0, vec![flipped(1, 1.0), flipped(3, 0.15)]),
                ("CH_rot_y", 1.5, vec![h(1, 1.0)]),
                ("BL_acc_x", 1.3, vec![flipped(1, 1.0)]),
                ("BR_acc_x", 1.3, vec![flipped(1, 1.0)]),
                ("TL_acc_x", 1.6, vec![flipped(1, 1.0)]),
                ("TR_acc_x", 1.6, vec![flipped(1, 1.0)]),
                ("BL_rot_z", 0.9, vec![h(1, 1.0)]),
                ("BR_rot_z", 0.9, vec![flipped(1, 1.0)]),
            ],
        ),
        _ => return None,
    };
    Some(t)
}

pub fn exercise_templates() -> BTreeMap<String, ExerciseTemplate> {
    EXERCISES.iter().map(|&n| (n.to_string(), exercise_template(n).expect("preset exists"))).collect()
}

/// Poorer classes move less energy through the ankles and the hip-worn wrist
/// sensors' accelerometers, while wrist rotation grows larger and less steady.
/// The chest is unaffected.
pub fn default_quality_model() -> QualityModel {
    let class = |k: f64| ClassEffect {
        amplitude: vec![
            AmplitudeRule {
                positions: vec![Position::BL, Position::BR],
                modality: None,
                axis: None,
                factor: 1.0 - 0.1 * k,
            },
            AmplitudeRule {
                positions: vec![Position::TL, Position::TR],
                modality: Some(Modality::Acc),
                axis: None,
                factor: 1.0 - 0.12 * k,
            },
            AmplitudeRule {
                positions: vec![Position::TL, Position::TR],
                modality: Some(Modality::Rot),
                axis: None,
                factor: 1.0 + 0.2 * k,
            },
        ],
        rotation_noise: 1.0 + 0.15 * k,
        period_factor: 1.0,
    };
    QualityModel([class(0.0), class(1.0), class(2.0), class(3.0), class(4.0)])
}
