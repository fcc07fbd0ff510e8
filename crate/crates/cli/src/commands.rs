use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use remo_core::features::{build_dataset, featurize, Dataset, FeatureVector, Target};
use remo_core::learn::{
    cross_validate, grid_search, train, ClassifierKind, ClassifierSpec, HyperGrid, Model, Scalar, SearchSpace,
};
use remo_core::model::{interval_iou, Segment};
use remo_core::segmentation::{extract_segment_data, segment_recording_traced, SegmenterConfig};
use remo_core::synth::{generate, SynthConfig, TruthEvent};
use serde_json::json;

use crate::io::{
    self, read_features, read_json, read_ndjson, read_recording, write_features, write_ndjson, write_recording,
    DataError,
};
use crate::manifest::{manifest_path, FileDigest, RunManifest};
use crate::num::fmt_sig;
use crate::plot::segmentation_svg;
use crate::report::{render, Format, ReportFile};

#[derive(Debug, Parser)]
#[command(name = "remo", version, about = "Segment, featurize and classify repeated-exercise motion recordings")]
pub struct Cli {
    /// More log output on stderr (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Worker threads for per-recording and per-candidate work
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic recordings with ground truth
    Synth(SynthArgs),
    /// Find repetition boundaries in recordings
    Segment(SegmentArgs),
    /// Turn segments into feature rows
    Featurize(FeaturizeArgs),
    /// Train one classifier on a feature table
    Train(TrainArgs),
    /// Classify feature rows with a trained model
    Predict(PredictArgs),
    /// Stratified k-fold cross-validation of one classifier
    Evaluate(EvaluateArgs),
    /// Grid search over classifiers and hyperparameters
    Autotune(AutotuneArgs),
    /// Render a report as canonical JSON, a text table or an SVG confusion matrix
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator configuration (JSON); flags below override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Exercise preset; repeat for several
    #[arg(long = "exercise")]
    pub exercises: Vec<String>,
    /// Seed of the first recording; recording i uses seed + i
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub sets: Option<usize>,
    /// Signal-to-noise power ratio of the dominant channel
    #[arg(long)]
    pub snr: Option<f64>,
    /// Relative period and amplitude jitter, e.g. 0.1
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Recordings per exercise
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Output CSV for a single recording
    #[arg(long, conflicts_with = "out_dir", required_unless_present = "out_dir")]
    pub out: Option<PathBuf>,
    /// Output directory for several recordings
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Recording CSV (with a .meta.json sidecar); repeatable
    #[arg(long = "recording", required = true)]
    pub recordings: Vec<PathBuf>,
    /// Segmenter configuration (JSON); defaults to the preset of each recording's exercise
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output NDJSON of segments
    #[arg(long)]
    pub out: PathBuf,
    /// SVG of the filtered reference signal and boundaries (single recording only)
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long = "recording", required = true)]
    pub recordings: Vec<PathBuf>,
    /// Segments NDJSON; repeatable
    #[arg(long = "segments", required = true)]
    pub segments: Vec<PathBuf>,
    /// Ground-truth NDJSON; when given, quality labels come from the best-overlapping
    /// event and segments without one are dropped
    #[arg(long = "truth")]
    pub truth: Vec<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Minimum interval IoU for a segment to take a ground-truth label
    #[arg(long, default_value_t = 0.5)]
    pub min_iou: f64,
    /// Output feature CSV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Classifier spec (JSON)
    #[arg(long, conflicts_with = "kind", required_unless_present = "kind")]
    pub spec: Option<PathBuf>,
    /// Classifier kind: nb, tree, rf or knn
    #[arg(long)]
    pub kind: Option<ClassifierKind>,
    /// Hyperparameter as key=value; repeatable
    #[arg(long = "param", value_name = "KEY=VALUE", requires = "kind")]
    pub params: Vec<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Feature CSV; repeatable
    #[arg(long = "features", required = true)]
    pub features: Vec<PathBuf>,
    #[arg(long)]
    pub target: Target,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output model JSON
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "features", required = true)]
    pub features: Vec<PathBuf>,
    /// Output CSV; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long = "features", required = true)]
    pub features: Vec<PathBuf>,
    #[arg(long)]
    pub target: Target,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Seed of the fold assignment and of the classifier
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output report JSON
    #[arg(long)]
    pub out: PathBuf,
    /// Keep wall-clock training times in the report (makes it machine dependent)
    #[arg(long)]
    pub with_timings: bool,
}

#[derive(Debug, Args)]
pub struct AutotuneArgs {
    #[arg(long = "features", required = true)]
    pub features: Vec<PathBuf>,
    #[arg(long)]
    pub target: Target,
    /// Search space JSON: {"kind": [{"param": [values...]}, ...]}; a built-in space otherwise
    #[arg(long)]
    pub space: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output search result JSON
    #[arg(long)]
    pub out: PathBuf,
    /// Also train the winning spec on all rows and save it here
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub with_timings: bool,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Report or search result JSON
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Collects what a command touched for its manifest.
struct Run {
    command: &'static str,
    argv: Vec<String>,
    started: Instant,
    config: serde_json::Value,
    seeds: Vec<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    timings_ms: BTreeMap<String, f64>,
}

impl Run {
    fn new(command: &'static str, argv: &[String]) -> Run {
        Run {
            command,
            argv: argv.to_vec(),
            started: Instant::now(),
            config: serde_json::Value::Null,
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    fn time(&mut self, phase: &str, since: Instant) {
        self.timings_ms.insert(phase.into(), since.elapsed().as_secs_f64() * 1e3);
    }

    fn finish(mut self, manifest: &Path) -> Result<()> {
        self.time("total", self.started);
        let digests = |paths: &[PathBuf]| paths.iter().map(|p| FileDigest::of(p)).collect::<Result<Vec<_>>>();
        let m = RunManifest {
            tool: "remo".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            argv: self.argv,
            cwd: std::env::current_dir()?,
            config: self.config,
            seeds: self.seeds,
            inputs: digests(&self.inputs)?,
            outputs: digests(&self.outputs)?,
            timings_ms: self.timings_ms,
        };
        m.write(manifest)?;
        info!("manifest written to {}", manifest.display());
        Ok(())
    }
}

pub fn run(cli: Cli, argv: &[String]) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth(a, argv),
        Command::Segment(a) => segment(a, argv),
        Command::Featurize(a) => featurize_cmd(a, argv),
        Command::Train(a) => train_cmd(a, argv),
        Command::Predict(a) => predict(a, argv),
        Command::Evaluate(a) => evaluate(a, argv),
        Command::Autotune(a) => autotune(a, argv),
        Command::Render(a) => render_cmd(a, argv),
    }
}

fn synth(a: SynthArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new("synth", argv);
    let mut base: SynthConfig = match &a.config {
        Some(p) => {
            run.inputs.push(p.clone());
            read_json(p)?
        }
        None => SynthConfig::default(),
    };
    if let Some(n) = a.reps {
        base.reps_per_set = n;
    }
    if let Some(n) = a.sets {
        base.sets = n;
    }
    if let Some(j) = a.jitter {
        base.jitter.period_pct = j;
        base.jitter.amplitude_pct = j;
    }
    if let Some(s) = a.seed {
        base.seed = s;
    }
    let exercises = if a.exercises.is_empty() { vec![base.exercise.clone()] } else { a.exercises.clone() };
    let total = exercises.len() * a.count;
    if total == 0 {
        return Err(DataError::Usage("--count must be at least 1".into()).into());
    }
    if a.out.is_some() && total > 1 {
        return Err(DataError::Usage(format!("{total} recordings requested; use --out-dir")).into());
    }

    let mut jobs = Vec::with_capacity(total);
    for ex in &exercises {
        for _ in 0..a.count {
            let i = jobs.len() as u64;
            let mut cfg = SynthConfig { exercise: ex.clone(), seed: base.seed.wrapping_add(i), ..base.clone() };
            if let Some(snr) = a.snr {
                cfg = cfg.with_snr(snr)?;
            }
            let path = match (&a.out, &a.out_dir) {
                (Some(p), _) => p.clone(),
                (None, Some(d)) => d.join(format!("{ex}-{}.csv", cfg.seed)),
                (None, None) => unreachable!("clap requires one of --out/--out-dir"),
            };
            cfg.recording_id = io::recording_id(&path);
            jobs.push((cfg, path));
        }
    }
    if let Some(d) = &a.out_dir {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }

    let t = Instant::now();
    let written: Vec<Vec<PathBuf>> = jobs
        .par_iter()
        .map(|(cfg, path)| -> Result<Vec<PathBuf>> {
            let s = generate(cfg)?;
            write_recording(path, &s.recording)?;
            let truth = io::sibling(path, "truth.ndjson");
            write_ndjson(&truth, &s.events)?;
            info!("{}: {} samples, {} events", path.display(), s.recording.len(), s.events.len());
            Ok(vec![path.clone(), io::sibling(path, "meta.json"), truth])
        })
        .collect::<Result<_>>()?;
    run.time("generate", t);

    run.seeds = jobs.iter().map(|(c, _)| c.seed).collect();
    run.config = json!({ "base": base, "exercises": exercises, "count": a.count, "snr": a.snr });
    run.outputs = written.into_iter().flatten().collect();
    let manifest = manifest_path(a.out.as_deref().or(a.out_dir.as_deref()).expect("an output"));
    run.finish(&manifest)
}

fn load_segmenter_config(path: Option<&Path>, run: &mut Run) -> Result<Option<SegmenterConfig>> {
    let Some(p) = path else { return Ok(None) };
    run.inputs.push(p.to_path_buf());
    let cfg: SegmenterConfig = read_json(p)?;
    for w in cfg.validate()? {
        warn!("{}: {w}", p.display());
    }
    Ok(Some(cfg))
}

fn segment(a: SegmentArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new("segment", argv);
    if a.plot.is_some() && a.recordings.len() != 1 {
        return Err(DataError::Usage("--plot takes exactly one --recording".into()).into());
    }
    let explicit = load_segmenter_config(a.config.as_deref(), &mut run)?;
    let t = Instant::now();
    let results: Vec<_> = a
        .recordings
        .par_iter()
        .map(|path| -> Result<_> {
            let rec = read_recording(path)?;
            let cfg = explicit.clone().unwrap_or_else(|| SegmenterConfig::preset(&rec.meta.exercise));
            let trace =
                segment_recording_traced(&rec, &cfg).with_context(|| format!("segmenting {}", path.display()))?;
            info!(
                "{}: reference {}, period {:.0} ms, {} segments, {} windows discarded",
                rec.id,
                trace.reference,
                trace.period.period_ms,
                trace.segments.len(),
                trace.discarded
            );
            Ok((rec.id.clone(), cfg, trace))
        })
        .collect::<Result<_>>()?;
    run.time("segment", t);

    let segments: Vec<&Segment> = results.iter().flat_map(|(_, _, t)| &t.segments).collect();
    write_ndjson(&a.out, &segments)?;
    run.outputs.push(a.out.clone());
    if let Some(plot) = &a.plot {
        let (id, _, trace) = &results[0];
        let mut w = io::create(plot)?;
        w.write_all(segmentation_svg(trace, id).as_bytes())?;
        w.flush()?;
        run.outputs.push(plot.clone());
    }
    run.inputs.extend(a.recordings.iter().cloned());
    let configs: BTreeMap<&str, &SegmenterConfig> = results.iter().map(|(id, c, _)| (id.as_str(), c)).collect();
    run.config = json!({ "segmenter": configs });
    run.finish(&manifest_path(&a.out))
}

fn featurize_cmd(a: FeaturizeArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new("featurize", argv);
    let explicit = load_segmenter_config(a.config.as_deref(), &mut run)?;
    let mut by_recording: HashMap<String, Vec<Segment>> = HashMap::new();
    for p in &a.segments {
        for s in read_ndjson::<Segment>(p)? {
            by_recording.entry(s.recording_id.clone()).or_default().push(s);
        }
    }
    let mut truth: HashMap<String, Vec<TruthEvent>> = HashMap::new();
    for p in &a.truth {
        for e in read_ndjson::<TruthEvent>(p)? {
            truth.entry(e.recording_id.clone()).or_default().push(e);
        }
    }
    let known: Vec<String> = a.recordings.iter().map(|p| io::recording_id(p)).collect();
    if let Some(orphan) = by_recording.keys().filter(|id| !known.contains(id)).min() {
        return Err(DataError::Usage(format!(
            "segments reference recording {orphan:?}, which was not given with --recording"
        ))
        .into());
    }
    let use_truth = !a.truth.is_empty();

    let t = Instant::now();
    let per_recording: Vec<(Vec<FeatureVector>, usize, usize)> = a
        .recordings
        .par_iter()
        .map(|path| -> Result<_> {
            let rec = read_recording(path)?;
            let segs = by_recording.get(&rec.id).map(Vec::as_slice).unwrap_or_default();
            let cfg = explicit.clone().unwrap_or_else(|| SegmenterConfig::preset(&rec.meta.exercise));
            let data = extract_segment_data(&rec, segs, &cfg).with_context(|| format!("cutting {}", path.display()))?;
            let events = truth.get(&rec.id).map(Vec::as_slice).unwrap_or_default();
            let mut rows = Vec::with_capacity(data.len());
            let (mut raw, mut dropped) = (0, 0);
            for sd in &data {
                let f = featurize(sd)?;
                let mut v = f.vector;
                v.exercise = Some(rec.meta.exercise.clone()).filter(|e| !e.is_empty());
                if use_truth {
                    let s = &sd.segment;
                    let best = events
                        .iter()
                        .map(|e| (interval_iou((s.t_start_ms, s.t_end_ms), (e.t_start_ms, e.t_end_ms)), e))
                        .filter(|(iou, _)| *iou >= a.min_iou)
                        .max_by(|x, y| x.0.total_cmp(&y.0));
                    match best {
                        Some((_, e)) => {
                            v.exercise = Some(e.exercise.clone());
                            v.quality = Some(e.quality);
                        }
                        None => {
                            dropped += 1;
                            continue;
                        }
                    }
                }
                raw += f.raw_samples;
                rows.push(v);
            }
            Ok((rows, raw, dropped))
        })
        .collect::<Result<_>>()?;
    run.time("featurize", t);

    let dropped: usize = per_recording.iter().map(|r| r.2).sum();
    if dropped > 0 {
        warn!("{dropped} segment(s) matched no ground-truth event at IoU >= {} and were dropped", a.min_iou);
    }
    let raw: usize = per_recording.iter().map(|r| r.1).sum();
    let rows: Vec<FeatureVector> = per_recording.into_iter().flat_map(|r| r.0).collect();
    if !rows.is_empty() {
        let per_event = raw as f64 / rows.len() as f64;
        info!(
            "{} feature rows; {:.0} raw samples per event on average, compression ratio 1:{:.1}",
            rows.len(),
            per_event,
            per_event / remo_core::features::FEATURE_DIM as f64
        );
    }
    write_features(&a.out, &rows)?;
    run.inputs.extend(a.recordings.iter().chain(&a.segments).chain(&a.truth).cloned());
    run.outputs.push(a.out.clone());
    run.config = json!({ "segmenter": explicit, "min_iou": a.min_iou, "labels_from_truth": use_truth });
    run.finish(&manifest_path(&a.out))
}

fn parse_scalar(s: &str) -> Scalar {
    if let Ok(i) = s.parse::<i64>() {
        Scalar::Int(i)
    } else if let Ok(f) = s.parse::<f64>() {
        Scalar::Float(f)
    } else {
        Scalar::Text(s.to_string())
    }
}

fn resolve_spec(a: &SpecArgs, seed: u64, run: &mut Run) -> Result<ClassifierSpec> {
    let mut spec = match (&a.spec, a.kind) {
        (Some(p), _) => {
            run.inputs.push(p.clone());
            read_json::<ClassifierSpec>(p)?
        }
        (None, Some(kind)) => ClassifierSpec::new(kind),
        (None, None) => unreachable!("clap requires --spec or --kind"),
    };
    for kv in &a.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| DataError::Usage(format!("--param {kv:?} is not KEY=VALUE")))?;
        spec.hyperparameters.insert(k.to_string(), parse_scalar(v));
    }
    spec.seed = seed;
    spec.params()?;
    Ok(spec)
}

fn load_dataset(paths: &[PathBuf], target: Target, run: &mut Run) -> Result<Dataset> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_features(p)?);
        run.inputs.push(p.clone());
    }
    let ds = build_dataset(rows, target)?;
    info!("{} rows, {} classes: {}", ds.len(), ds.class_set.len(), ds.class_set.join(" "));
    Ok(ds)
}

fn train_cmd(a: TrainArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new("train", argv);
    let spec = resolve_spec(&a.spec, a.seed, &mut run)?;
    let ds = load_dataset(&a.features, a.target, &mut run)?;
    let t = Instant::now();
    let model = train(&spec, &ds)?;
    run.time("train", t);
    let mut w = io::create(&a.out)?;
    w.write_all(model.to_json().as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    run.outputs.push(a.out.clone());
    run.seeds = vec![spec.seed];
    run.config = json!({ "spec": spec, "target": a.target });
    run.finish(&manifest_path(&a.out))
}

fn predict(a: PredictArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new("predict", argv);
    let text = std::fs::read_to_string(&a.model)
        .map_err(|e| DataError::Invalid { path: a.model.clone(), message: e.to_string() })?;
    let model = Model::from_json(&text)?;
    run.inputs.push(a.model.clone());
    let mut rows = Vec::new();
    for p in &a.features {
        rows.extend(read_features(p)?);
        run.inputs.push(p.clone());
    }
    let mut out = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["row".to_string(), "truth".into(), "predicted".into()];
    header.extend(model.class_set.iter().map(|c| format!("p_{c}")));
    out.write_record(&header)?;
    for (i, r) in rows.iter().enumerate() {
        let p = model.predict(r)?;
        let mut rec = vec![i.to_string(), r.label(model.target).unwrap_or_default(), p.class];
        rec.extend(p.scores.iter().map(|&s| fmt_sig(s, 6)));
        out.write_record(&rec)?;
    }
    let bytes = out.into_inner().context("flushing predictions")?;
    match &a.out {
        Some(path) => {
            let mut w = io::create(path)?;
            w.write_all(&bytes)?;
            w.flush()?;
            run.outputs.push(path.clone());
            run.config = json!({ "spec": model.spec, "target": model.target });
            run.finish(&manifest_path(path))
        }
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}

fn evaluate(a: EvaluateArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new("evaluate", argv);
    let spec = resolve_spec(&a.spec, a.seed, &mut run)?;
    let ds = load_dataset(&a.features, a.target, &mut run)?;
    let t = Instant::now();
    let report = cross_validate(&spec, &ds, a.folds, a.seed)?;
    run.time("cross_validate", t);
    info!("{}: mean {}-fold accuracy {:.4}", spec.label(), a.folds, report.mean_accuracy);
    let report = if a.with_timings { report } else { report.without_timings() };
    io::write_json_pretty(&a.out, &report)?;
    run.outputs.push(a.out.clone());
    run.seeds = vec![a.seed];
    run.config = json!({ "spec": spec, "target": a.target, "folds": a.folds });
    run.finish(&manifest_path(&a.out))
}

/// Defaults of every kind plus a small grid around them.
pub fn default_space() -> SearchSpace {
    let grid = |pairs: &[(&str, Vec<Scalar>)]| -> HyperGrid {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    };
    let ints = |xs: &[i64]| xs.iter().map(|&x| Scalar::Int(x)).collect::<Vec<_>>();
    let mut space = SearchSpace::new();
    space.insert(ClassifierKind::Nb, vec![HyperGrid::new()]);
    space.insert(
        ClassifierKind::Tree,
        vec![HyperGrid::new(), grid(&[("min_leaf", ints(&[1, 2, 5, 10])), ("max_depth", ints(&[5, 10, 20]))])],
    );
    space.insert(
        ClassifierKind::Rf,
        vec![
            HyperGrid::new(),
            grid(&[("n_trees", ints(&[50, 150])), ("mtry", ints(&[3, 6, 10])), ("min_leaf", ints(&[1, 3]))]),
        ],
    );
    space.insert(
        ClassifierKind::Knn,
        vec![
            HyperGrid::new(),
            grid(&[("k", ints(&[1, 3, 5, 9])), ("weighting", vec!["uniform".into(), "inverse-distance".into()])]),
        ],
    );
    space
}

fn autotune(a: AutotuneArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new("autotune", argv);
    let space = match &a.space {
        Some(p) => {
            run.inputs.push(p.clone());
            read_json(p)?
        }
        None => default_space(),
    };
    let ds = load_dataset(&a.features, a.target, &mut run)?;
    let t = Instant::now();
    let mut result = grid_search(&space, &ds, a.folds, a.seed)?;
    run.time("search", t);
    info!(
        "best of {} candidates: {} with mean accuracy {:.4}",
        result.leaderboard.len(),
        result.best.label(),
        result.report.mean_accuracy
    );
    for e in result.leaderboard.iter().filter(|e| e.error.is_some()) {
        warn!("{} failed: {}", e.spec.label(), e.error.as_deref().unwrap_or_default());
    }
    if !a.with_timings {
        result.report = result.report.without_timings();
        result.leaderboard.iter_mut().for_each(|e| e.training_ms = 0.0);
    }
    io::write_json_pretty(&a.out, &result)?;
    run.outputs.push(a.out.clone());
    if let Some(path) = &a.model {
        let t = Instant::now();
        let model = train(&result.best, &ds)?;
        run.time("train_best", t);
        let mut w = io::create(path)?;
        w.write_all(model.to_json().as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
        run.outputs.push(path.clone());
    }
    run.seeds = vec![a.seed];
    run.config = json!({ "space": space, "target": a.target, "folds": a.folds });
    run.finish(&manifest_path(&a.out))
}

fn render_cmd(a: RenderArgs, argv: &[String]) -> Result<()> {
    let mut run = Run::new("render", argv);
    let file: ReportFile = read_json(&a.report)?;
    run.inputs.push(a.report.clone());
    let bytes = render(&file, a.format);
    match &a.out {
        Some(path) => {
            let mut w = io::create(path)?;
            w.write_all(&bytes)?;
            w.flush()?;
            run.outputs.push(path.clone());
            run.config = json!({ "format": format!("{:?}", a.format).to_lowercase() });
            run.finish(&manifest_path(path))
        }
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
    }
}
