//! Rendering of evaluation and search reports.

use std::fmt::Write;

use remo_core::learn::{adjacency_rate, EvaluationReport, SearchResult};
use serde::Deserialize;
use serde_json::Value;

use crate::num::fmt_sig;

/// Significant digits of floats in canonical JSON.
pub const JSON_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
    SvgConfusion,
}

/// A report file: either a cross-validation report or a search result
/// carrying one.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ReportFile {
    Search(SearchResult),
    Evaluation(EvaluationReport),
}

impl ReportFile {
    pub fn report(&self) -> &EvaluationReport {
        match self {
            ReportFile::Search(s) => &s.report,
            ReportFile::Evaluation(r) => r,
        }
    }
}

pub fn render(file: &ReportFile, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let value = match file {
                ReportFile::Search(s) => serde_json::to_value(s),
                ReportFile::Evaluation(r) => serde_json::to_value(r),
            }
            .expect("reports serialize");
            canonical_json(&value).into_bytes()
        }
        Format::Table => table(file).into_bytes(),
        Format::SvgConfusion => confusion_svg(file.report()).into_bytes(),
    }
}

/// Sorted keys, two-space indentation, floats at six significant digits.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => write!(out, "{i}").unwrap(),
            (_, Some(u)) => write!(out, "{u}").unwrap(),
            _ => out.push_str(&fmt_sig(n.as_f64().expect("finite number"), JSON_DIGITS)),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            // short numeric arrays stay on one line
            if items.iter().all(Value::is_number) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(k.to_string()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

/// Per-class recognition rates, average and training duration, one row per
/// classifier; search results append the leaderboard.
fn table(file: &ReportFile) -> String {
    let r = file.report();
    let m = &r.confusion;
    let mut out = String::new();
    let label_w = r.spec.label().len().max(10);
    write!(out, "{:<label_w$}", "classifier").unwrap();
    for c in &m.classes {
        write!(out, " {:>8}", c).unwrap();
    }
    writeln!(out, " {:>8} {:>12}", "average", "duration_ms").unwrap();
    write!(out, "{:<label_w$}", r.spec.label()).unwrap();
    for i in 0..m.classes.len() {
        write!(out, " {:>8}", m.class_rate(i).map_or("-".into(), pct)).unwrap();
    }
    let duration = if r.training_ms > 0.0 { format!("{:.0}", r.training_ms) } else { "-".into() };
    writeln!(out, " {:>8} {:>12}", pct(r.mean_accuracy), duration).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "folds: {}  seed: {}  instances: {}", r.k, r.seed, m.total()).unwrap();
    writeln!(out, "pooled accuracy: {}%", pct(r.accuracy)).unwrap();
    match adjacency_rate(m) {
        Some(a) => writeln!(out, "misclassifications in an adjacent class: {}%", pct(a)).unwrap(),
        None => writeln!(out, "misclassifications in an adjacent class: -").unwrap(),
    }
    if let ReportFile::Search(s) = file {
        writeln!(out).unwrap();
        let w = s.leaderboard.iter().map(|e| e.spec.label().len()).max().unwrap_or(0).max(10);
        writeln!(out, "{:<w$} {:>8}", "candidate", "mean").unwrap();
        for e in &s.leaderboard {
            let score = match (&e.mean_accuracy, &e.error) {
                (Some(a), _) => pct(*a),
                (None, Some(err)) => format!("failed: {err}"),
                (None, None) => "-".into(),
            };
            let mark = if e.spec == s.best { "  *" } else { "" };
            writeln!(out, "{:<w$} {:>8}{mark}", e.spec.label(), score).unwrap();
        }
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Confusion matrix as a shaded grid: rows are true classes, columns
/// predictions, opacity is count over row total.
pub fn confusion_svg(r: &EvaluationReport) -> String {
    const CELL: usize = 48;
    const MARGIN: usize = 90;
    let m = &r.confusion;
    let n = m.classes.len();
    let size = MARGIN + n * CELL + 20;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="16" text-anchor="middle">predicted</text>"#, MARGIN + n * CELL / 2).unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">true</text>"#,
        MARGIN + n * CELL / 2,
        MARGIN + n * CELL / 2
    )
    .unwrap();
    for (i, c) in m.classes.iter().enumerate() {
        let c = xml_escape(c);
        let mid = MARGIN + i * CELL + CELL / 2;
        writeln!(s, r#"<text x="{mid}" y="{}" text-anchor="middle">{c}</text>"#, MARGIN - 8).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{c}</text>"#, MARGIN - 8, mid + 4).unwrap();
    }
    for i in 0..n {
        let total = m.row_total(i);
        for j in 0..n {
            let count = m.counts[i][j];
            let shade = if total > 0 { count as f64 / total as f64 } else { 0.0 };
            let (x, y) = (MARGIN + j * CELL, MARGIN + i * CELL);
            writeln!(
                s,
                r##"<rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="#1f4e79" fill-opacity="{}" stroke="#999" data-row="{i}" data-col="{j}" data-count="{count}" data-row-total="{total}"/>"##,
                fmt_sig(shade, JSON_DIGITS)
            )
            .unwrap();
            let ink = if shade > 0.5 { "white" } else { "black" };
            writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" fill="{ink}">{count}</text>"#,
                x + CELL / 2,
                y + CELL / 2 + 4
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}
