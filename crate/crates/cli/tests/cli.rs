use std::path::Path;
use std::process::{Command, Output};

fn seedgrow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seedgrow"))
        .args(args)
        .output()
        .expect("spawn seedgrow")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_toy(dir: &Path) {
    let mut data = String::from("x\n");
    for i in 0..10 {
        data.push_str(&format!("{}\n", f64::from(i) / 10.0));
    }
    for i in 0..10 {
        data.push_str(&format!("{}\n", 5.0 + f64::from(i) / 10.0));
    }
    data.push_str("20\n");
    std::fs::write(dir.join("data.csv"), data).unwrap();
    let mut seeds = String::from("id,cluster_id\n");
    for i in 1..=8 {
        seeds.push_str(&format!("{i},0\n{},1\n", 10 + i));
    }
    std::fs::write(dir.join("seeds.csv"), seeds).unwrap();
}

#[test]
fn generate_1d_writes_30045_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = seedgrow(&[
        "generate",
        "--bench",
        "1d",
        "--seed",
        "42",
        "--out",
        path(dir.path()),
    ]);
    assert!(out.status.success());
    let data = std::fs::read_to_string(dir.path().join("data.csv")).unwrap();
    assert_eq!(data.lines().count(), 30046);
    assert_eq!(data.lines().next().unwrap(), "x0,label");
    let spec = std::fs::read_to_string(dir.path().join("spec.txt")).unwrap();
    assert!(spec.contains("total_points = 30045"));
    let seeds = std::fs::read_to_string(dir.path().join("seeds.csv")).unwrap();
    assert_eq!(seeds.lines().count(), 151);
}

#[test]
fn cluster_toy_matches_hand_trace() {
    let dir = tempfile::tempdir().unwrap();
    write_toy(dir.path());
    let run = dir.path().join("run");
    let out = seedgrow(&[
        "cluster",
        "--data",
        path(&dir.path().join("data.csv")),
        "--seeds",
        path(&dir.path().join("seeds.csv")),
        "--out",
        path(&run),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let results = std::fs::read_to_string(run.join("results.csv")).unwrap();
    let labels: Vec<&str> = results
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    let mut want = vec!["0"; 10];
    want.extend(vec!["1"; 10]);
    want.push("-1");
    assert_eq!(labels, want);
    let report = std::fs::read_to_string(run.join("report.txt")).unwrap();
    assert!(report.contains("converged = yes"));
    let model = std::fs::read_to_string(run.join("model.json")).unwrap();
    assert!(model.contains("\"format\": \"seedgrow-model/1\""));

    // Predict against the saved model.
    std::fs::write(dir.path().join("new.csv"), "x\n1.0\n2.5\n5.45\n").unwrap();
    let out = seedgrow(&[
        "predict",
        "--model",
        path(&run.join("model.json")),
        "--in",
        path(&dir.path().join("new.csv")),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let labels: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(labels, ["0", "-1", "1"]);
}

#[test]
fn evaluate_identical_labels() {
    let dir = tempfile::tempdir().unwrap();
    let truth = dir.path().join("truth.csv");
    let pred = dir.path().join("pred.csv");
    std::fs::write(&truth, "x,label\n0,0\n1,0\n9,-1\n").unwrap();
    std::fs::write(&pred, "id,label,score\n0,0,3\n1,0,3\n2,-1,0\n").unwrap();
    let kv = dir.path().join("eval.txt");
    let out = seedgrow(&[
        "evaluate",
        "--pred",
        path(&pred),
        "--truth",
        path(&truth),
        "--out",
        path(&kv),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("accuracy: 1.000000"));
    assert!(std::fs::read_to_string(kv)
        .unwrap()
        .contains("accuracy = 1\n"));
}

#[test]
fn exit_codes() {
    let out = seedgrow(&["cluster", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let out = seedgrow(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = seedgrow(&["generate", "--bench", "3d", "--seed", "1", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
    let out = seedgrow(&["--help"]);
    assert_eq!(out.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = seedgrow(&[
        "cluster",
        "--data",
        path(&missing),
        "--seeds",
        path(&missing),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.starts_with("error: "));

    // Duplicate seed ids are a runtime error.
    write_toy(dir.path());
    std::fs::write(dir.path().join("dup.csv"), "id,cluster\n3,0\n3,1\n").unwrap();
    let out = seedgrow(&[
        "cluster",
        "--data",
        path(&dir.path().join("data.csv")),
        "--seeds",
        path(&dir.path().join("dup.csv")),
        "--out",
        path(&dir.path().join("run")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("duplicate seed for point 3"));
}

#[test]
fn bad_cell_reports_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    write_toy(dir.path());
    std::fs::write(
        dir.path().join("bad.csv"),
        "a,b\n1,2\n1,2\n1,2\n1,2\n1,abc\n",
    )
    .unwrap();
    let out = seedgrow(&[
        "cluster",
        "--data",
        path(&dir.path().join("bad.csv")),
        "--seeds",
        path(&dir.path().join("seeds.csv")),
        "--out",
        path(&dir.path().join("run")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("row 5, column 2"));
}
