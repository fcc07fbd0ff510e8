//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use remo_cli::io::read_features;
use remo_cli::manifest::{FileDigest, RunManifest};
use remo_core::dsp::{design_lowpass, estimate_period, std_dev, FilterCoefficients, FilterSpec};
use remo_core::features::{build_dataset, featurize, Dataset, FeatureVector, Target, FEATURE_DIM};
use remo_core::learn::{
    adjacency_rate, train, ClassifierKind, ClassifierSpec, ConfusionMatrix, EvaluationReport, SearchResult,
};
use remo_core::model::{Segment, SegmentData};
use remo_core::segmentation::{extract_segment_data, segment_recording, SegmenterConfig};
use remo_core::synth::{generate, match_events, presets::EXERCISES, Jitter, SynthConfig};

type Outcome = Result<String, String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn remo(dir: &Path, args: &[String]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_remo"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| format!("cannot run remo: {e}"))?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "remo {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn args(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn within(limit: Duration, t: Instant) -> Result<Duration, String> {
    let took = t.elapsed();
    check!(took <= limit, "took {:.1} s, limit {} s", took.as_secs_f64(), limit.as_secs());
    Ok(took)
}

fn read_report<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Synthesizes, segments and featurizes a corpus through the CLI.
fn build_corpus(dir: &Path, exercises: &[&str], count: usize, seed: u64) -> Result<PathBuf, String> {
    let mut synth = args(&[
        "synth",
        "--count",
        &count.to_string(),
        "--snr",
        "10",
        "--jitter",
        "0.1",
        "--seed",
        &seed.to_string(),
        "--out-dir",
        "rec",
    ]);
    for ex in exercises {
        synth.extend(args(&["--exercise", ex]));
    }
    remo(dir, &synth)?;
    let mut recordings = Vec::new();
    for (k, ex) in exercises.iter().enumerate() {
        for i in 0..count {
            recordings.push(format!("rec/{ex}-{}.csv", seed + (k * count + i) as u64));
        }
    }
    let mut segment = args(&["segment", "--out", "segments.ndjson"]);
    let mut featurize = args(&["featurize", "--segments", "segments.ndjson", "--out", "features.csv"]);
    for r in &recordings {
        segment.extend(["--recording".into(), r.clone()]);
        featurize.extend(["--recording".into(), r.clone(), "--truth".into(), r.replace(".csv", ".truth.ndjson")]);
    }
    remo(dir, &segment)?;
    remo(dir, &featurize)?;
    Ok(dir.join("features.csv"))
}

fn dataset(path: &Path, target: Target) -> Result<Dataset, String> {
    let rows = read_features(path).map_err(|e| e.to_string())?;
    build_dataset(rows, target).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let runs: Vec<_> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let ex = EXERCISES[i as usize % EXERCISES.len()];
            let cfg = SynthConfig {
                exercise: ex.into(),
                recording_id: format!("r{i}"),
                seed: 1000 + i,
                ..SynthConfig::default()
            }
            .with_snr(10.0)
            .map_err(|e| e.to_string())?;
            let s = generate(&cfg).map_err(|e| e.to_string())?;
            let segs =
                segment_recording(&s.recording, &SegmenterConfig::preset(ex)).map_err(|e| format!("{ex}: {e}"))?;
            Ok((s.events, segs))
        })
        .collect::<Result<_, String>>()?;
    let took = within(Duration::from_secs(60), t)?;
    let (truth, segs): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let truth: Vec<_> = truth.into_iter().flatten().collect();
    let segs: Vec<Segment> = segs.into_iter().flatten().collect();
    let m = match_events(&truth, &segs, 0.7);
    let worst = m.matches.iter().flatten().map(|&(_, iou)| iou).fold(1.0, f64::min);
    check!(m.extraction_rate() >= 0.98, "extraction rate {:.4} < 0.98", m.extraction_rate());
    Ok(format!(
        "{}/{} events extracted ({:.2}%) at IoU >= 0.7, worst matched IoU {worst:.3}, {:.1} s",
        m.matched(),
        truth.len(),
        100.0 * m.extraction_rate(),
        took.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut events = 0;
    let mut worst = 0i64;
    for ex in EXERCISES {
        let cfg = SynthConfig {
            exercise: ex.into(),
            jitter: Jitter { period_pct: 0.0, amplitude_pct: 0.0 },
            ..SynthConfig::default()
        };
        let s = generate(&cfg).map_err(|e| e.to_string())?;
        let segs = segment_recording(&s.recording, &SegmenterConfig::preset(ex)).map_err(|e| format!("{ex}: {e}"))?;
        check!(segs.len() == s.events.len(), "{ex}: {} segments for {} events", segs.len(), s.events.len());
        let rec = &s.recording;
        for (seg, ev) in segs.iter().zip(&s.events) {
            let ds = rec.index_at(seg.t_start_ms) as i64 - rec.index_at(ev.t_start_ms) as i64;
            let de = rec.index_at(seg.t_end_ms) as i64 - rec.index_at(ev.t_end_ms) as i64;
            worst = worst.max(ds.abs()).max(de.abs());
            check!(ds.abs() <= 2 && de.abs() <= 2, "{ex} event {}: boundary off by ({ds}, {de}) samples", ev.index);
        }
        events += s.events.len();
    }
    let took = within(Duration::from_secs(5), t)?;
    Ok(format!("{events}/{events} events, max boundary error {worst} samples, {:.2} s", took.as_secs_f64()))
}

fn criterion_3(corpora: &[&Path]) -> Outcome {
    let mut rows = 0;
    for p in corpora {
        let text = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
        for (i, line) in text.lines().enumerate().skip(1) {
            let numeric = line.split(',').take(FEATURE_DIM + 2).filter(|f| f.parse::<f64>().is_ok()).count();
            check!(
                numeric == FEATURE_DIM || numeric == FEATURE_DIM + 1,
                "{}: line {i} has {numeric} numeric fields",
                p.display()
            );
            check!(line.split(',').count() == FEATURE_DIM + 2, "{}: line {i} has wrong width", p.display());
        }
        for r in read_features(p).map_err(|e| e.to_string())? {
            check!(r.values().len() == FEATURE_DIM, "vector of length {}", r.values().len());
            rows += 1;
        }
    }
    // one repetition of 112 samples on each of the 30 channels
    let cfg = SynthConfig {
        reps_per_set: 1,
        sets: 1,
        base_period_ms: Some(1120.0),
        jitter: Jitter { period_pct: 0.0, amplitude_pct: 0.0 },
        ..SynthConfig::default()
    };
    let s = generate(&cfg).map_err(|e| e.to_string())?;
    let ev = &s.events[0];
    let seg =
        Segment { recording_id: ev.recording_id.clone(), index: 0, t_start_ms: ev.t_start_ms, t_end_ms: ev.t_end_ms };
    let data: Vec<SegmentData> =
        extract_segment_data(&s.recording, &[seg], &SegmenterConfig::default()).map_err(|e| e.to_string())?;
    let f = featurize(&data[0]).map_err(|e| e.to_string())?;
    let ratio = f.compression_ratio();
    check!(f.vector.values().len() == FEATURE_DIM, "feature length {}", f.vector.values().len());
    check!((108.0..=110.0).contains(&ratio), "compression ratio {ratio:.2} for {} raw samples", f.raw_samples);
    Ok(format!(
        "{rows} corpus vectors all have {FEATURE_DIM} numeric components; {}-sample event -> ratio 1:{ratio:.1}",
        f.raw_samples
    ))
}

struct QualityRun {
    features: PathBuf,
    search: SearchResult,
    manual: Vec<EvaluationReport>,
}

fn criterion_4(dir: &Path) -> Result<(String, QualityRun), String> {
    let t = Instant::now();
    let features = build_corpus(dir, &["lunge"], 24, 100)?;
    let ds = dataset(&features, Target::Quality)?;
    check!(ds.len() >= 1200, "only {} events", ds.len());
    check!(ds.class_set.len() == 5, "classes {:?}", ds.class_set);
    remo(
        dir,
        &args(&[
            "autotune",
            "--features",
            "features.csv",
            "--target",
            "quality",
            "--folds",
            "10",
            "--seed",
            "7",
            "--out",
            "search.json",
        ]),
    )?;
    let search: SearchResult = read_report(&dir.join("search.json"))?;
    let mut manual = Vec::new();
    for kind in ClassifierKind::ALL {
        let out = format!("manual-{kind}.json");
        remo(
            dir,
            &args(&[
                "evaluate",
                "--features",
                "features.csv",
                "--target",
                "quality",
                "--kind",
                kind.as_str(),
                "--folds",
                "10",
                "--seed",
                "7",
                "--out",
                &out,
            ]),
        )?;
        manual.push(read_report::<EvaluationReport>(&dir.join(out))?);
    }
    let took = within(Duration::from_secs(600), t)?;
    let best = search.report.mean_accuracy;
    check!(best >= 0.95, "autotune mean accuracy {best:.4} < 0.95 ({})", search.best.label());
    for r in &manual {
        check!(best >= r.mean_accuracy, "manual {} scored {:.4} > search {best:.4}", r.spec.label(), r.mean_accuracy);
    }
    let manual_summary: Vec<String> =
        manual.iter().map(|r| format!("{} {:.4}", r.spec.label(), r.mean_accuracy)).collect();
    let line = format!(
        "{} events, 5 classes; autotune best {} at {:.4} mean 10-fold accuracy >= manual [{}]; {:.0} s",
        ds.len(),
        search.best.label(),
        best,
        manual_summary.join(", "),
        took.as_secs_f64()
    );
    Ok((line, QualityRun { features, search, manual }))
}

fn criterion_5(dir: &Path) -> Result<(String, PathBuf), String> {
    let t = Instant::now();
    let features = build_corpus(dir, &EXERCISES, 2, 500)?;
    let ds = dataset(&features, Target::Exercise)?;
    check!(ds.len() >= 600, "only {} events", ds.len());
    check!(ds.class_set.len() == 6, "classes {:?}", ds.class_set);
    remo(
        dir,
        &args(&[
            "evaluate",
            "--features",
            "features.csv",
            "--target",
            "exercise",
            "--kind",
            "rf",
            "--folds",
            "10",
            "--seed",
            "3",
            "--out",
            "rf.json",
        ]),
    )?;
    let r: EvaluationReport = read_report(&dir.join("rf.json"))?;
    let took = within(Duration::from_secs(120), t)?;
    check!(r.mean_accuracy >= 0.99, "rf mean accuracy {:.4} < 0.99", r.mean_accuracy);
    Ok((
        format!(
            "{} events, 6 exercises, rf mean 10-fold accuracy {:.4}, {:.0} s",
            ds.len(),
            r.mean_accuracy,
            took.as_secs_f64()
        ),
        features,
    ))
}

fn criterion_6(q: &QualityRun) -> Outcome {
    // kNN k=1 on distinct rows
    let ds = dataset(&q.features, Target::Quality)?;
    let mut distinct: Vec<FeatureVector> = Vec::new();
    for r in &ds.rows {
        if !distinct.iter().any(|d| d.values() == r.values()) {
            distinct.push(r.clone());
        }
    }
    let dd = build_dataset(distinct, Target::Quality).map_err(|e| e.to_string())?;
    let knn = train(&ClassifierSpec::new(ClassifierKind::Knn).with("k", 1), &dd).map_err(|e| e.to_string())?;
    let hits = dd
        .rows
        .iter()
        .filter(|r| knn.predict(r).map(|p| Some(p.class) == r.label(Target::Quality)).unwrap_or(false))
        .count();
    check!(hits == dd.len(), "knn k=1 self-accuracy {hits}/{}", dd.len());

    // NB posterior at class means of well-separated Gaussians
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let unit = Normal::new(0.0, 1.0).unwrap();
    let centers: Vec<[f64; FEATURE_DIM]> =
        (0..3).map(|c| std::array::from_fn(|d| 10.0 * c as f64 + if d % 2 == 0 { 5.0 } else { 0.0 })).collect();
    let mut rows = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..200 {
            let v: [f64; FEATURE_DIM] = std::array::from_fn(|d| center[d] + unit.sample(&mut rng));
            let mut stds = [0.0; 30];
            stds.copy_from_slice(&v[..30]);
            rows.push(FeatureVector { stds, delta_t_ms: v[30], exercise: Some(format!("c{c}")), quality: None });
        }
    }
    let gauss = build_dataset(rows, Target::Exercise).map_err(|e| e.to_string())?;
    let nb = train(&ClassifierSpec::new(ClassifierKind::Nb), &gauss).map_err(|e| e.to_string())?;
    let mut min_post = 1.0f64;
    for c in 0..3 {
        let members: Vec<[f64; FEATURE_DIM]> =
            gauss.values().into_iter().enumerate().filter(|(i, _)| gauss.class_index(*i) == c).map(|x| x.1).collect();
        let mean: [f64; FEATURE_DIM] =
            std::array::from_fn(|d| members.iter().map(|m| m[d]).sum::<f64>() / members.len() as f64);
        let p = nb.predict_values(&mean).map_err(|e| e.to_string())?;
        check!(p.class_index == c, "class mean {c} predicted as {}", p.class);
        min_post = min_post.min(p.scores[c]);
    }
    check!(min_post >= 0.99, "posterior at class mean {min_post}");

    // confusion trace / total against accuracy recomputed from the predictions
    let mut worst = 0.0f64;
    for r in q.manual.iter().chain([&q.search.report]) {
        let truth = ds.class_indices();
        check!(r.predictions.len() == truth.len(), "{} predictions for {} rows", r.predictions.len(), truth.len());
        let correct = truth.iter().zip(&r.predictions).filter(|(a, b)| a == b).count();
        let recomputed = correct as f64 / truth.len() as f64;
        let m: &ConfusionMatrix = &r.confusion;
        let from_matrix = m.trace() as f64 / m.total() as f64;
        worst = worst.max((from_matrix - recomputed).abs());
        check!(
            (from_matrix - recomputed).abs() <= 1e-12,
            "{}: trace/total {from_matrix} vs {recomputed}",
            r.spec.label()
        );
    }
    Ok(format!(
        "knn k=1 self-accuracy {hits}/{}; nb posterior at class means >= {min_post:.6}; trace/total vs recomputed accuracy max diff {worst:e}",
        dd.len()
    ))
}

fn poly_magnitude(p: &[f64], w: f64) -> f64 {
    let (re, im) = p
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(re, im), (k, &v)| (re + v * (w * k as f64).cos(), im - v * (w * k as f64).sin()));
    (re * re + im * im).sqrt()
}

/// |H(e^jw)| of the section cascade that filtering runs on.
fn magnitude(c: &FilterCoefficients, freq_hz: f64, fs: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * freq_hz / fs;
    c.sections.iter().map(|s| poly_magnitude(&s.b, w) / poly_magnitude(&s.a, w)).product()
}

/// The same response from the expanded b/a polynomials.
fn magnitude_ba(c: &FilterCoefficients, freq_hz: f64, fs: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * freq_hz / fs;
    poly_magnitude(&c.b, w) / poly_magnitude(&c.a, w)
}

fn criterion_7() -> Outcome {
    let mut worst_dc = 0.0f64;
    let mut worst_db = 0.0f64;
    for order in [2, 4, 6, 8] {
        for cf in [0.0065, 0.01, 0.012, 0.025] {
            let spec = FilterSpec::new(order, 100.0, cf);
            let c = design_lowpass(&spec).map_err(|e| e.to_string())?;
            let dc = magnitude(&c, 0.0, 100.0);
            worst_dc = worst_dc.max((dc - 1.0).abs());
            if order <= 4 {
                // the expanded polynomials lose digits at higher orders and low corners
                worst_dc = worst_dc.max((magnitude_ba(&c, 0.0, 100.0) - 1.0).abs());
            }
            let db = 20.0 * magnitude(&c, spec.cutoff_hz(), 100.0).log10();
            worst_db = worst_db.max((db + 3.0103).abs());
        }
    }
    check!(worst_dc <= 1e-9, "DC gain off by {worst_dc:e}");
    check!(worst_db <= 0.1, "corner gain off -3 dB by {worst_db:.4} dB");

    let mut worst_lag = 0i64;
    for period in [23usize, 50, 77, 120, 260] {
        let x: Vec<f64> = (0..3000).map(|i| (2.0 * std::f64::consts::PI * i as f64 / period as f64).sin()).collect();
        let p = estimate_period(&x, 100.0, 100.0, 5000.0).map_err(|e| e.to_string())?;
        let d = p.lag_samples as i64 - period as i64;
        worst_lag = worst_lag.max(d.abs());
        check!(d.abs() <= 1, "sine of period {period}: estimate {}", p.lag_samples);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_rel = 0.0f64;
    let cases = 1000;
    for _ in 0..cases {
        let n = rng.random_range(2..400);
        let spread: f64 = rng.random_range(0.01..100.0);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0) * spread).collect();
        let shift: f64 = rng.random_range(-100.0..100.0);
        let scale: f64 = rng.random_range(0.1..10.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
        let s = std_dev(&x).map_err(|e| e.to_string())?;
        if s == 0.0 {
            continue;
        }
        let shifted = std_dev(&x.iter().map(|v| v + shift).collect::<Vec<_>>()).unwrap();
        let scaled = std_dev(&x.iter().map(|v| v * scale).collect::<Vec<_>>()).unwrap();
        let rel = ((shifted - s) / s).abs().max(((scaled - scale.abs() * s) / (scale.abs() * s)).abs());
        worst_rel = worst_rel.max(rel);
        check!(rel <= 1e-9, "sigma property broken on n={n}: relative error {rel:e}");
    }
    Ok(format!(
        "DC gain error {worst_dc:.1e}, corner error {worst_db:.4} dB, sine period error <= {worst_lag} lag, sigma shift/scale over {cases} signals max rel error {worst_rel:.1e}"
    ))
}

fn criterion_8(dir: &Path) -> Outcome {
    let steps: Vec<Vec<String>> = vec![
        args(&[
            "synth",
            "--exercise",
            "lunge",
            "--exercise",
            "squat",
            "--count",
            "2",
            "--sets",
            "1",
            "--snr",
            "10",
            "--seed",
            "11",
            "--out-dir",
            "rec",
        ]),
        args(&["synth", "--exercise", "crunch", "--sets", "1", "--reps", "10", "--out", "single.csv"]),
        args(&[
            "segment",
            "--recording",
            "rec/lunge-11.csv",
            "--recording",
            "rec/lunge-12.csv",
            "--recording",
            "rec/squat-13.csv",
            "--recording",
            "rec/squat-14.csv",
            "--out",
            "seg.ndjson",
        ]),
        args(&["segment", "--recording", "single.csv", "--out", "single.ndjson", "--plot", "single.svg"]),
        args(&[
            "featurize",
            "--recording",
            "rec/lunge-11.csv",
            "--recording",
            "rec/lunge-12.csv",
            "--recording",
            "rec/squat-13.csv",
            "--recording",
            "rec/squat-14.csv",
            "--segments",
            "seg.ndjson",
            "--truth",
            "rec/lunge-11.truth.ndjson",
            "--truth",
            "rec/lunge-12.truth.ndjson",
            "--truth",
            "rec/squat-13.truth.ndjson",
            "--truth",
            "rec/squat-14.truth.ndjson",
            "--out",
            "f.csv",
        ]),
        args(&[
            "train",
            "--features",
            "f.csv",
            "--target",
            "quality",
            "--kind",
            "rf",
            "--param",
            "n_trees=30",
            "--seed",
            "5",
            "--out",
            "rf.json",
        ]),
        args(&["predict", "--model", "rf.json", "--features", "f.csv", "--out", "pred.csv"]),
        args(&[
            "evaluate",
            "--features",
            "f.csv",
            "--target",
            "quality",
            "--kind",
            "rf",
            "--param",
            "n_trees=30",
            "--seed",
            "5",
            "--out",
            "eval.json",
        ]),
        args(&[
            "autotune",
            "--features",
            "f.csv",
            "--target",
            "exercise",
            "--space",
            "space.json",
            "--folds",
            "5",
            "--seed",
            "2",
            "--out",
            "search.json",
            "--model",
            "best.json",
        ]),
        args(&["render", "--report", "eval.json", "--format", "json", "--out", "eval.canonical.json"]),
        args(&["render", "--report", "search.json", "--format", "table", "--out", "search.txt"]),
        args(&["render", "--report", "eval.json", "--format", "svg-confusion", "--out", "cm.svg"]),
    ];
    std::fs::write(dir.join("space.json"), r#"{"tree": [{}], "rf": [{"n_trees": [10, 20]}], "knn": [{"k": [1, 3]}]}"#)
        .unwrap();
    let manifests = [
        "rec/manifest.json",
        "single.csv.manifest.json",
        "seg.ndjson.manifest.json",
        "single.ndjson.manifest.json",
        "f.csv.manifest.json",
        "rf.json.manifest.json",
        "pred.csv.manifest.json",
        "eval.json.manifest.json",
        "search.json.manifest.json",
        "eval.canonical.json.manifest.json",
        "search.txt.manifest.json",
        "cm.svg.manifest.json",
    ];
    for s in &steps {
        remo(dir, s)?;
    }
    let mut files = 0;
    let mut commands = BTreeMap::new();
    for m in manifests {
        let manifest: RunManifest = read_report(&dir.join(m))?;
        *commands.entry(manifest.command.clone()).or_insert(0) += 1;
        let before = &manifest.outputs;
        check!(!before.is_empty(), "{m}: no outputs recorded");
        for d in before {
            let now = FileDigest::of(&manifest.cwd.join(&d.path)).map_err(|e| e.to_string())?;
            check!(now.sha256 == d.sha256, "{m}: {} changed before the rerun", d.path.display());
        }
        remo(&manifest.cwd, &manifest.argv)?;
        for d in before {
            let again = FileDigest::of(&manifest.cwd.join(&d.path)).map_err(|e| e.to_string())?;
            check!(again.sha256 == d.sha256, "{m}: rerun changed {}", d.path.display());
            files += 1;
        }
    }
    check!(commands.len() == 8, "only {} of 8 commands covered", commands.len());
    Ok(format!(
        "{} manifests ({} commands) rerun, {files} output files byte-identical by sha256",
        manifests.len(),
        commands.len()
    ))
}

fn criterion_9(q: &QualityRun) -> Outcome {
    let mut parts = Vec::new();
    let (mut off, mut adjacent) = (0u64, 0u64);
    for r in [&q.search.report].into_iter().chain(&q.manual) {
        let m = &r.confusion;
        let n = m.classes.len();
        let mut o = 0;
        let mut a = 0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    o += m.counts[i][j];
                    if i.abs_diff(j) == 1 {
                        a += m.counts[i][j];
                    }
                }
            }
        }
        let rate = adjacency_rate(m);
        if let Some(rate) = rate {
            check!((rate - a as f64 / o as f64).abs() < 1e-12, "{}: adjacency {rate} vs recount", r.spec.label());
        }
        let who = if std::ptr::eq(r, &q.search.report) { format!("best {}", r.spec.label()) } else { r.spec.label() };
        parts.push(format!("{who} {}", rate.map_or("n/a".into(), |x| format!("{:.3} of {o}", x))));
        off += o;
        adjacent += a;
    }
    check!(off > 0, "no misclassifications to assess");
    let pooled = adjacent as f64 / off as f64;
    check!(pooled >= 0.9, "only {:.3} of {off} misclassifications are adjacent", pooled);
    Ok(format!(
        "{adjacent}/{off} misclassifications adjacent ({:.1}%); per classifier: {}",
        100.0 * pooled,
        parts.join(", ")
    ))
}

fn main() {
    let root = tempfile::tempdir().expect("temp dir");
    let sub = |name: &str| {
        let p = root.path().join(name);
        std::fs::create_dir_all(&p).unwrap();
        p
    };
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "segmentation yield", criterion_1()));
    results.push((2, "noiseless boundary identity", criterion_2()));
    let quality = criterion_4(&sub("quality"));
    let activity = criterion_5(&sub("activity"));
    let corpora: Vec<&Path> =
        [quality.as_ref().ok().map(|q| q.1.features.as_path()), activity.as_ref().ok().map(|a| a.1.as_path())]
            .into_iter()
            .flatten()
            .collect();
    results.push((3, "feature contract", criterion_3(&corpora)));
    let (q4, qrun) = match quality {
        Ok((line, run)) => (Ok(line), Some(run)),
        Err(e) => (Err(e), None),
    };
    results.push((4, "quality assessment", q4));
    results.push((5, "activity recognition", activity.map(|a| a.0)));
    let missing = || Err("criterion 4 corpus unavailable".to_string());
    results.push((6, "classifier oracles", qrun.as_ref().map_or_else(missing, criterion_6)));
    results.push((7, "dsp numerics", criterion_7()));
    results.push((8, "determinism", criterion_8(&sub("determinism"))));
    results.push((9, "ordinal adjacency", qrun.as_ref().map_or_else(missing, criterion_9)));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {why}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
