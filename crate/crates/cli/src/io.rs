//! On-disk formats: recording CSV with a JSON sidecar, NDJSON event lists
//! and the feature table.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use remo_core::features::FeatureVector;
use remo_core::model::{validate_recording, ChannelId, QualityLabel, Recording, RecordingMeta, Violation};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::fmt_sig;

/// Input that cannot be used as given. Maps to exit code 2.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{path}: recording violates {} rule(s):\n  {}", .violations.len(), .violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n  "))]
    Violations { path: PathBuf, violations: Vec<Violation> },
    #[error("{0}")]
    Usage(String),
}

fn invalid(path: &Path, message: impl Into<String>) -> DataError {
    DataError::Invalid { path: path.to_path_buf(), message: message.into() }
}

/// Significant digits of recording samples.
pub const SAMPLE_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidecarMeta {
    pub sample_rate_hz: f64,
    pub subject_id: String,
    pub exercise: String,
    pub set_id: String,
}

/// `dir/name.csv` -> `dir/name.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn recording_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn open(path: &Path) -> Result<File, DataError> {
    File::open(path).map_err(|e| invalid(path, format!("cannot open: {e}")))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, DataError> {
    let f = open(path)?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| invalid(path, e.to_string()))
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Reads a recording and its `.meta.json` sidecar; the id is the file stem.
/// Every recording invariant is checked.
pub fn read_recording(path: &Path) -> Result<Recording, DataError> {
    let meta_path = sibling(path, "meta.json");
    let meta: SidecarMeta = read_json(&meta_path)?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(open(path)?));
    let header = rdr.headers().map_err(|e| invalid(path, e.to_string()))?.clone();
    if header.get(0) != Some("t_ms") {
        return Err(invalid(path, "first column must be t_ms"));
    }
    let mut columns = Vec::with_capacity(header.len() - 1);
    for name in header.iter().skip(1) {
        let id: ChannelId = name.parse().map_err(|_| invalid(path, format!("unknown column {name:?}")))?;
        if columns.contains(&id) {
            return Err(invalid(path, format!("duplicate column {name:?}")));
        }
        columns.push(id);
    }
    let mut channels: BTreeMap<ChannelId, Vec<f64>> = columns.iter().map(|&c| (c, Vec::new())).collect();
    let step_ms = 1000.0 / meta.sample_rate_hz;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| invalid(path, e.to_string()))?;
        let parse = |i: usize| -> Result<f64, DataError> {
            let s = rec.get(i).unwrap_or("");
            s.trim().parse().map_err(|_| invalid(path, format!("row {}: column {i}: not a number: {s:?}", row + 1)))
        };
        let t = parse(0)?;
        if (t - row as f64 * step_ms).abs() > 0.01 * step_ms {
            return Err(invalid(
                path,
                format!("row {}: t_ms {t} is off the {} Hz sample grid", row + 1, meta.sample_rate_hz),
            ));
        }
        for (i, c) in columns.iter().enumerate() {
            channels.get_mut(c).expect("column channel").push(parse(i + 1)?);
        }
    }
    let recording = Recording {
        id: recording_id(path),
        sample_rate_hz: meta.sample_rate_hz,
        channels,
        meta: RecordingMeta { subject_id: meta.subject_id, exercise: meta.exercise, set_id: meta.set_id },
    };
    let violations = validate_recording(&recording);
    if !violations.is_empty() {
        return Err(DataError::Violations { path: path.to_path_buf(), violations });
    }
    Ok(recording)
}

/// Writes the CSV and its sidecar. Samples keep nine significant digits.
pub fn write_recording(path: &Path, rec: &Recording) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["t_ms".to_string()];
    header.extend(ChannelId::ALL.iter().map(|c| c.column_name()));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for i in 0..rec.len() {
        row.clear();
        row.push(fmt_sig(rec.t_ms(i), SAMPLE_DIGITS));
        row.extend(ChannelId::ALL.iter().map(|&c| fmt_sig(rec.channel(c)[i], SAMPLE_DIGITS)));
        w.write_record(&row)?;
    }
    w.flush()?;
    let meta = SidecarMeta {
        sample_rate_hz: rec.sample_rate_hz,
        subject_id: rec.meta.subject_id.clone(),
        exercise: rec.meta.exercise.clone(),
        set_id: rec.meta.set_id.clone(),
    };
    write_json_pretty(&sibling(path, "meta.json"), &meta)
}

pub fn read_ndjson<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, DataError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| invalid(path, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| invalid(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

pub fn write_ndjson<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn feature_header() -> Vec<String> {
    let mut h: Vec<String> = ChannelId::ALL.iter().map(|c| c.column_name()).collect();
    h.extend(["delta_t_ms", "exercise", "quality"].map(String::from));
    h
}

/// Feature table: 31 numeric columns, then `exercise` and `quality`
/// (empty when unknown). Values are written at full precision.
pub fn write_features(path: &Path, rows: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(feature_header())?;
    for r in rows {
        let mut rec: Vec<String> = r.values().iter().map(f64::to_string).collect();
        rec.push(r.exercise.clone().unwrap_or_default());
        rec.push(r.quality.map(|q| q.to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureVector>, DataError> {
    let mut rdr = csv::Reader::from_reader(BufReader::new(open(path)?));
    let header = rdr.headers().map_err(|e| invalid(path, e.to_string()))?;
    let expected = feature_header();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(invalid(path, format!("header must be {}", expected.join(","))));
    }
    let mut rows = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| invalid(path, e.to_string()))?;
        let at = |m: String| invalid(path, format!("row {}: {m}", row + 1));
        let mut values = [0.0f64; 31];
        for (i, v) in values.iter_mut().enumerate() {
            let s = &rec[i];
            *v = s.parse().map_err(|_| at(format!("{}: not a number: {s:?}", expected[i])))?;
            if !v.is_finite() {
                return Err(at(format!("{}: not finite", expected[i])));
            }
        }
        let exercise = Some(rec[31].to_string()).filter(|s| !s.is_empty());
        let quality = match &rec[32] {
            "" => None,
            s => Some(s.parse::<QualityLabel>().map_err(|e| at(format!("quality: {e}")))?),
        };
        let mut stds = [0.0; 30];
        stds.copy_from_slice(&values[..30]);
        rows.push(FeatureVector { stds, delta_t_ms: values[30], exercise, quality });
    }
    Ok(rows)
}
