use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pdlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdlab")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = pdlab(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn report(dir: &Path, args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&ok(dir, args)).unwrap()
}

#[test]
fn gen_writes_sequence_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--family", "enum", "--alphabet", "01", "--len", "1000", "--out", "e.seq"]);
    let text = fs::read_to_string(dir.path().join("e.seq")).unwrap();
    let (header, body) = text.split_once('\n').unwrap();
    assert!(header.contains("family=enum"));
    assert!(body.starts_with("0100011011"));
    assert_eq!(body.trim_end().len(), 1000);
    assert!(dir.path().join("e.seq.checkpoints.csv").exists());
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a.seq", "b.seq"] {
        ok(dir.path(), &["gen", "--family", "t4", "--k", "8", "--seed", "3", "--len", "5000", "--out", out]);
    }
    assert_eq!(fs::read(dir.path().join("a.seq")).unwrap(), fs::read(dir.path().join("b.seq")).unwrap());
}

#[test]
fn gen_rejects_bad_params() {
    let dir = tempfile::tempdir().unwrap();
    let out = pdlab(dir.path(), &["gen", "--family", "t6", "--k", "2", "--seed", "1", "--len", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));
}

#[test]
fn lz78_round_trip_and_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--family", "t2", "--c", "2", "--seed", "2", "--len", "4000", "--out", "w.seq"]);
    ok(d, &["compress", "lz78", "w.seq", "w.lz"]);
    ok(d, &["decompress", "lz78", "w.lz", "w.back"]);
    assert_eq!(fs::read(d.join("w.seq")).unwrap(), fs::read(d.join("w.back")).unwrap());

    let bytes = fs::read(d.join("w.lz")).unwrap();
    fs::write(d.join("t.lz"), &bytes[..20]).unwrap();
    let out = pdlab(d, &["decompress", "lz78", "t.lz", "t.back"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed stream"));
}

#[test]
fn zoo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--family", "t4", "--k", "8", "--seed", "3", "--len", "5000", "--out", "a.seq"]);
    ok(d, &["compress", "zoo:t4", "--k", "8", "--period", "32", "a.seq", "a.z"]);
    ok(d, &["decompress", "zoo:t4", "--k", "8", "--period", "32", "a.z", "a.back"]);
    assert_eq!(fs::read(d.join("a.seq")).unwrap(), fs::read(d.join("a.back")).unwrap());

    ok(d, &["gen", "--family", "t6", "--k", "4", "--v", "8", "--len", "20000", "--out", "b.seq"]);
    let zoo = ["--k", "4", "--v", "8", "--v-prime", "8"];
    ok(d, &[&["compress", "zoo:t6"][..], &zoo, &["b.seq", "b.z"]].concat());
    ok(d, &[&["decompress", "zoo:t6"][..], &zoo, &["b.z", "b.back"]].concat());
    assert_eq!(fs::read(d.join("b.seq")).unwrap(), fs::read(d.join("b.back")).unwrap());

    let out = pdlab(d, &["decompress", "plog:enum", "a.z", "x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = report(d, &["verify", "zoo:t6", "--mode", "il", "--maxlen", "10"]);
    assert_eq!(r["passed"], true);
    assert_eq!(r["detail"]["words"], 2047);
    assert_eq!(report(d, &["verify", "zoo:t5", "--mode", "visibly"])["passed"], true);
    let r = report(d, &["verify", "plog:enum", "--mode", "memory", "--a", "64", "--c", "2", "--n", "1e7"]);
    assert_eq!(r["passed"], true);
    let r = report(d, &["verify", "zoo:t4", "--mode", "inverse", "--samples", "50", "--seed", "1"]);
    assert_eq!(r["passed"], true);
}

#[test]
fn experiment_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.json"), "{bad").unwrap();
    let out = pdlab(d, &["experiment", "bad.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid config"));

    fs::write(d.join("neg.json"), r#"{"id":"x","witness":{"family":"enum"},"seed":0,"prefix_len":100,"tail_fraction":-1,
        "compressors":[{"name":"lz","selector":"lz78"}]}"#)
    .unwrap();
    let out = pdlab(d, &["experiment", "neg.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn experiment_writes_series() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("small.json"),
        r#"{"id":"small","witness":{"family":"enum"},"seed":0,"prefix_len":5000,
        "checkpoints":{"geometric":{"start":100,"factor":2.0},"include_end":true},
        "compressors":[{"name":"lz","selector":"lz78"},{"name":"enum","selector":"plog:enum"}],
        "assertions":[{"left":"enum.RHat","op":"<","right":"lz.rhoHat"}]}"#,
    )
    .unwrap();
    ok(d, &["experiment", "small.json", "--out", "o"]);
    let csv = fs::read_to_string(d.join("o/small/enum.csv")).unwrap();
    assert!(csv.starts_with("prefix_len,output_size,unit,ratio\n"));
    assert!(csv.contains("5000,28,bits,0.005600000000"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("o/small/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["assertions"][0]["passed"], true);
}
