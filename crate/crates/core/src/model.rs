//! Domain types shared by every stage of the pipeline: channel naming,
//! recordings, segments and quality labels.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of sensor streams in a recording (5 positions x 2 modalities x 3 axes).
pub const CHANNEL_COUNT: usize = 30;

/// Body position of a sensor device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Position {
    /// Top left (wrist).
    TL,
    /// Top right (wrist).
    TR,
    /// Bottom left (ankle).
    BL,
    /// Bottom right (ankle).
    BR,
    /// Chest.
    CH,
}

impl Position {
    pub const ALL: [Position; 5] = [Position::TL, Position::TR, Position::BL, Position::BR, Position::CH];

    pub fn as_str(self) -> &'static str {
        match self {
            Position::TL => "TL",
            Position::TR => "TR",
            Position::BL => "BL",
            Position::BR => "BR",
            Position::CH => "CH",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Acc,
    Rot,
}

impl Modality {
    pub const ALL: [Modality; 2] = [Modality::Acc, Modality::Rot];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Acc => "acc",
            Modality::Rot => "rot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// One of the 30 sensor streams.
///
/// The derived ordering is the canonical channel order: position first, then
/// modality, then axis, each following its enum declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelId {
    pub position: Position,
    pub modality: Modality,
    pub axis: Axis,
}

const fn channel(position: Position, modality: Modality, axis: Axis) -> ChannelId {
    ChannelId { position, modality, axis }
}

const fn build_all() -> [ChannelId; CHANNEL_COUNT] {
    let positions = [Position::TL, Position::TR, Position::BL, Position::BR, Position::CH];
    let modalities = [Modality::Acc, Modality::Rot];
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let mut out = [channel(Position::TL, Modality::Acc, Axis::X); CHANNEL_COUNT];
    let mut p = 0;
    while p < 5 {
        let mut m = 0;
        while m < 2 {
            let mut a = 0;
            while a < 3 {
                out[p * 6 + m * 3 + a] = channel(positions[p], modalities[m], axes[a]);
                a += 1;
            }
            m += 1;
        }
        p += 1;
    }
    out
}

impl ChannelId {
    /// All channels in canonical order.
    pub const ALL: [ChannelId; CHANNEL_COUNT] = build_all();

    pub const fn new(position: Position, modality: Modality, axis: Axis) -> Self {
        channel(position, modality, axis)
    }

    /// Position of this channel in the canonical order.
    pub fn index(self) -> usize {
        let p = Position::ALL.iter().position(|&p| p == self.position).unwrap();
        let m = Modality::ALL.iter().position(|&m| m == self.modality).unwrap();
        let a = Axis::ALL.iter().position(|&a| a == self.axis).unwrap();
        p * 6 + m * 3 + a
    }

    /// Column name used in CSV headers, e.g. `BL_acc_x`.
    pub fn column_name(self) -> String {
        format!("{}_{}_{}", self.position.as_str(), self.modality.as_str(), self.axis.as_str())
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.position.as_str(), self.modality.as_str(), self.axis.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown channel id {0:?}")]
pub struct ParseChannelError(pub String);

impl FromStr for ChannelId {
    type Err = ParseChannelError;

    /// Accepts both `BL/acc/x` and `BL_acc_x`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChannelId::ALL
            .iter()
            .copied()
            .find(|c| c.to_string() == s || c.column_name() == s)
            .ok_or_else(|| ParseChannelError(s.to_string()))
    }
}

impl Serialize for ChannelId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ChannelId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub subject_id: String,
    pub exercise: String,
    pub set_id: String,
}

/// A uniformly sampled 30-channel recording. Sample `i` sits at
/// `i * 1000 / sample_rate_hz` milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub id: String,
    pub sample_rate_hz: f64,
    pub channels: BTreeMap<ChannelId, Vec<f64>>,
    pub meta: RecordingMeta,
}

impl Recording {
    /// Number of samples per channel (taken from the first present channel).
    pub fn len(&self) -> usize {
        self.channels.values().next().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, id: ChannelId) -> &[f64] {
        self.channels.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn t_ms(&self, index: usize) -> f64 {
        index as f64 * 1000.0 / self.sample_rate_hz
    }

    /// Sample index nearest to `t_ms`.
    pub fn index_at(&self, t_ms: f64) -> usize {
        (t_ms * self.sample_rate_hz / 1000.0).round().max(0.0) as usize
    }

    /// Applies `f` to every sample of every channel.
    pub fn map_samples(&self, f: impl Fn(ChannelId, f64) -> f64) -> Recording {
        let channels = self.channels.iter().map(|(&id, xs)| (id, xs.iter().map(|&x| f(id, x)).collect())).collect();
        Recording { channels, ..self.clone() }
    }
}

/// A rule broken by a [`Recording`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Violation {
    MissingChannel { channel: ChannelId },
    LengthMismatch { channel: ChannelId, expected: usize, actual: usize },
    TooShort { channel: ChannelId, len: usize },
    BadSampleRate { sample_rate_hz: f64 },
    NonFiniteSample { channel: ChannelId, index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingChannel { channel } => write!(f, "missing-channel {channel}"),
            Violation::LengthMismatch { channel, expected, actual } => {
                write!(f, "length-mismatch {channel}: expected {expected} samples, found {actual}")
            }
            Violation::TooShort { channel, len } => {
                write!(f, "too-short {channel}: {len} samples, need at least 2")
            }
            Violation::BadSampleRate { sample_rate_hz } => {
                write!(f, "bad-sample-rate: {sample_rate_hz} Hz is not positive and finite")
            }
            Violation::NonFiniteSample { channel, index } => {
                write!(f, "non-finite-sample {channel} at index {index}")
            }
        }
    }
}

/// Checks every [`Recording`] invariant and lists what is broken.
///
/// The expected length is the first present channel's length in canonical
/// order; every other channel is compared against it.
pub fn validate_recording(rec: &Recording) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(rec.sample_rate_hz.is_finite() && rec.sample_rate_hz > 0.0) {
        out.push(Violation::BadSampleRate { sample_rate_hz: rec.sample_rate_hz });
    }
    let mut expected: Option<usize> = None;
    for id in ChannelId::ALL {
        let Some(xs) = rec.channels.get(&id) else {
            out.push(Violation::MissingChannel { channel: id });
            continue;
        };
        match expected {
            None => {
                expected = Some(xs.len());
                if xs.len() < 2 {
                    out.push(Violation::TooShort { channel: id, len: xs.len() });
                }
            }
            Some(n) if n != xs.len() => {
                out.push(Violation::LengthMismatch { channel: id, expected: n, actual: xs.len() });
            }
            Some(_) => {}
        }
        if let Some(index) = xs.iter().position(|x| !x.is_finite()) {
            out.push(Violation::NonFiniteSample { channel: id, index });
        }
    }
    out
}

/// Boundaries of one extracted motion event. Times are in milliseconds
/// from the start of the recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub recording_id: String,
    pub index: usize,
    pub t_start_ms: f64,
    pub t_end_ms: f64,
}

impl Segment {
    pub fn duration_ms(&self) -> f64 {
        self.t_end_ms - self.t_start_ms
    }

    /// Intersection over union of two time intervals.
    pub fn iou(&self, start_ms: f64, end_ms: f64) -> f64 {
        interval_iou((self.t_start_ms, self.t_end_ms), (start_ms, end_ms))
    }
}

pub fn interval_iou(a: (f64, f64), b: (f64, f64)) -> f64 {
    let inter = (a.1.min(b.1) - a.0.max(b.0)).max(0.0);
    let union = a.1.max(b.1) - a.0.min(b.0);
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Per-channel sample slices of one segment, cut from the lightly smoothed
/// recording. All slices cover the same index range `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentData {
    pub segment: Segment,
    pub sample_rate_hz: f64,
    pub channels: BTreeMap<ChannelId, Vec<f64>>,
}

impl SegmentData {
    pub fn raw_samples(&self) -> usize {
        self.channels.values().map(Vec::len).sum()
    }
}

/// Ordinal quality class, 1 (very good) to 5 (very poor).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct QualityLabel(u8);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("quality class {0} is outside 1..=5")]
pub struct QualityRangeError(pub i64);

impl QualityLabel {
    pub const BEST: QualityLabel = QualityLabel(1);
    pub const WORST: QualityLabel = QualityLabel(5);

    pub fn new(r: u8) -> Result<Self, QualityRangeError> {
        if (1..=5).contains(&r) {
            Ok(QualityLabel(r))
        } else {
            Err(QualityRangeError(r as i64))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for QualityLabel {
    type Error = QualityRangeError;
    fn try_from(r: u8) -> Result<Self, Self::Error> {
        QualityLabel::new(r)
    }
}

impl From<QualityLabel> for u8 {
    fn from(q: QualityLabel) -> u8 {
        q.0
    }
}

impl fmt::Display for QualityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for QualityLabel {
    type Err = QualityRangeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: i64 = s.trim().parse().map_err(|_| QualityRangeError(-1))?;
        u8::try_from(v).map_err(|_| QualityRangeError(v)).and_then(QualityLabel::new)
    }
}

#[cfg(test)]
pub(crate) fn constant_recording(len: usize, fs: f64) -> Recording {
    let channels = ChannelId::ALL.iter().map(|&c| (c, vec![1.0; len])).collect();
    Recording { id: "r".into(), sample_rate_hz: fs, channels, meta: RecordingMeta::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_distinct_channels_in_canonical_order() {
        let all = ChannelId::ALL;
        let mut sorted = all.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 30);
        assert_eq!(sorted, all.to_vec());
        assert_eq!(all[0].column_name(), "TL_acc_x");
        assert_eq!(all[29].column_name(), "CH_rot_z");
        for (i, c) in all.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }

    #[test]
    fn channel_names_parse_back() {
        for c in ChannelId::ALL {
            assert_eq!(c.to_string().parse::<ChannelId>().unwrap(), c);
            assert_eq!(c.column_name().parse::<ChannelId>().unwrap(), c);
        }
        assert!("XX_acc_x".parse::<ChannelId>().is_err());
    }

    #[test]
    fn well_formed_recording_has_no_violations() {
        assert!(validate_recording(&constant_recording(10, 100.0)).is_empty());
    }

    #[test]
    fn missing_channel_is_named() {
        let mut rec = constant_recording(10, 100.0);
        let gone = ChannelId::new(Position::BL, Modality::Rot, Axis::Z);
        rec.channels.remove(&gone);
        let v = validate_recording(&rec);
        assert_eq!(v, vec![Violation::MissingChannel { channel: gone }]);
        assert_eq!(v[0].to_string(), "missing-channel BL/rot/z");
    }

    #[test]
    fn short_channel_is_a_length_mismatch() {
        let mut rec = constant_recording(10, 100.0);
        let c = ChannelId::new(Position::CH, Modality::Acc, Axis::Y);
        rec.channels.get_mut(&c).unwrap().pop();
        assert_eq!(validate_recording(&rec), vec![Violation::LengthMismatch { channel: c, expected: 10, actual: 9 }]);
    }

    #[test]
    fn bad_rate_and_single_sample() {
        let rec = constant_recording(1, 0.0);
        let v = validate_recording(&rec);
        assert!(v.contains(&Violation::BadSampleRate { sample_rate_hz: 0.0 }));
        assert!(v.iter().any(|x| matches!(x, Violation::TooShort { len: 1, .. })));
    }

    #[test]
    fn validation_is_pure() {
        let mut rec = constant_recording(10, 100.0);
        rec.channels.remove(&ChannelId::ALL[3]);
        assert_eq!(validate_recording(&rec), validate_recording(&rec));
    }

    #[test]
    fn quality_label_range() {
        assert!(QualityLabel::new(0).is_err());
        assert!(QualityLabel::new(6).is_err());
        assert_eq!("3".parse::<QualityLabel>().unwrap().get(), 3);
        assert!("-1".parse::<QualityLabel>().is_err());
        let q: QualityLabel = serde_json::from_str("4").unwrap();
        assert_eq!(q.get(), 4);
        assert!(serde_json::from_str::<QualityLabel>("7").is_err());
    }

    #[test]
    fn iou_of_intervals() {
        assert_eq!(interval_iou((0.0, 10.0), (0.0, 10.0)), 1.0);
        assert_eq!(interval_iou((0.0, 10.0), (10.0, 20.0)), 0.0);
        assert!((interval_iou((0.0, 10.0), (5.0, 15.0)) - 1.0 / 3.0).abs() < 1e-12);
    }
}
