use std::path::Path;
use std::process::{Command, Output};

fn remo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_remo")).current_dir(dir).args(args).output().expect("run remo")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = remo(dir, args);
    assert!(out.status.success(), "remo {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn segments_a_twenty_rep_recording() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["synth", "--exercise", "squat", "--sets", "1", "--reps", "20", "--seed", "4", "--out", "r.csv"]);
    let cfg = serde_json::to_string(&remo_core::segmentation::SegmenterConfig::preset("squat")).unwrap();
    std::fs::write(d.path().join("ex.json"), cfg).unwrap();
    let out = ok(d.path(), &["segment", "--recording", "r.csv", "--config", "ex.json", "--out", "s.ndjson"]);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(d.path().join("s.ndjson")).unwrap();
    assert_eq!(text.lines().count(), 20);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["recording_id"], "r");
    }
    assert!(d.path().join("s.ndjson.manifest.json").exists());
}

#[test]
fn usage_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    let out = remo(d.path(), &["segment", "--out", "s.ndjson"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    assert_eq!(remo(d.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        remo(d.path(), &["train", "--features", "f.csv", "--target", "quality", "--out", "m.json", "--kind", "svm"])
            .status
            .code(),
        Some(1)
    );

    let help = remo(d.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("autotune"));
}

#[test]
fn missing_channel_is_a_data_error() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["synth", "--sets", "1", "--reps", "3", "--out", "r.csv"]);
    let path = d.path().join("r.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    // drop the TR_acc_y column (third channel column)
    let cut: String = text
        .lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(8);
            f.join(",") + "\n"
        })
        .collect();
    std::fs::write(&path, cut).unwrap();
    let out = remo(d.path(), &["segment", "--recording", "r.csv", "--out", "s.ndjson"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("missing-channel TR/acc/y"), "{err}");
    assert!(!d.path().join("s.ndjson").exists());
}

#[test]
fn other_data_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(remo(d.path(), &["segment", "--recording", "nope.csv", "--out", "s.ndjson"]).status.code(), Some(2));

    ok(d.path(), &["synth", "--sets", "1", "--reps", "3", "--out", "r.csv"]);
    let path = d.path().join("r.csv");
    let text = std::fs::read_to_string(&path).unwrap().replacen("\n10,", "\n15,", 1);
    std::fs::write(&path, text).unwrap();
    let out = remo(d.path(), &["segment", "--recording", "r.csv", "--out", "s.ndjson"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sample grid"), "{}", stderr(&out));

    std::fs::write(d.path().join("m.json"), r#"{"format_version": 7}"#).unwrap();
    std::fs::write(d.path().join("f.csv"), "").unwrap();
    let out = remo(d.path(), &["predict", "--model", "m.json", "--features", "f.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unsupported-model-format"), "{}", stderr(&out));
}

#[test]
fn pipeline_composes_end_to_end() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(
        p,
        &[
            "synth",
            "--exercise",
            "lunge",
            "--exercise",
            "crunch",
            "--count",
            "1",
            "--snr",
            "10",
            "--seed",
            "9",
            "--out-dir",
            "rec",
        ],
    );
    let recs = ["rec/lunge-9.csv", "rec/crunch-10.csv"];
    ok(p, &["segment", "--recording", recs[0], "--recording", recs[1], "--out", "s.ndjson"]);
    ok(
        p,
        &[
            "featurize",
            "--recording",
            recs[0],
            "--recording",
            recs[1],
            "--segments",
            "s.ndjson",
            "--truth",
            "rec/lunge-9.truth.ndjson",
            "--truth",
            "rec/crunch-10.truth.ndjson",
            "--out",
            "f.csv",
        ],
    );
    let rows = std::fs::read_to_string(p.join("f.csv")).unwrap();
    assert_eq!(rows.lines().count(), 121);
    ok(
        p,
        &["train", "--features", "f.csv", "--target", "exercise", "--kind", "knn", "--param", "k=3", "--out", "m.json"],
    );
    let pred = ok(p, &["predict", "--model", "m.json", "--features", "f.csv"]);
    let pred = String::from_utf8(pred.stdout).unwrap();
    assert!(pred.starts_with("row,truth,predicted,p_crunch,p_lunge\n"), "{pred}");
    assert!(pred.lines().skip(1).all(|l| {
        let f: Vec<&str> = l.split(',').collect();
        f[1] == f[2]
    }));
    ok(p, &["evaluate", "--features", "f.csv", "--target", "quality", "--kind", "tree", "--out", "rep.json"]);
    ok(p, &["render", "--report", "rep.json", "--format", "svg-confusion", "--out", "cm.svg"]);

    // every cell's shading is its count over its row total
    let svg = std::fs::read_to_string(p.join("cm.svg")).unwrap();
    let attr = |line: &str, name: &str| -> f64 {
        let start = line.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
        line[start..start + line[start..].find('"').unwrap()].parse().unwrap()
    };
    let cells: Vec<&str> = svg.lines().filter(|l| l.contains("class=\"cell\"")).collect();
    assert_eq!(cells.len(), 25);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("rep.json")).unwrap()).unwrap();
    for c in cells {
        let (i, j) = (attr(c, "data-row") as usize, attr(c, "data-col") as usize);
        let count = report["confusion"]["counts"][i][j].as_f64().unwrap();
        let row: f64 = report["confusion"]["counts"][i].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
        assert_eq!(attr(c, "data-count"), count);
        let expected = if row > 0.0 { count / row } else { 0.0 };
        assert!((attr(c, "fill-opacity") - expected).abs() < 1e-6);
    }

    let a = ok(p, &["render", "--report", "rep.json", "--format", "json"]).stdout;
    let b = ok(p, &["render", "--report", "rep.json", "--format", "json"]).stdout;
    assert_eq!(a, b);
    let table = String::from_utf8(ok(p, &["render", "--report", "rep.json"]).stdout).unwrap();
    assert!(table.lines().next().unwrap().ends_with("average  duration_ms"), "{table}");
}

#[test]
fn plot_is_written_for_one_recording() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["synth", "--sets", "1", "--reps", "5", "--out", "r.csv"]);
    ok(d.path(), &["segment", "--recording", "r.csv", "--out", "s.ndjson", "--plot", "p.svg"]);
    let svg = std::fs::read_to_string(d.path().join("p.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"boundary\"").count(), 10);
    assert!(svg.contains("<polyline"));
}
