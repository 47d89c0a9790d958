use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use primset::automata::PartialAutomaton;
use primset::MatrixSet;

const FIG: &str = r#"{"n":3,"matrices":[[[0,1,0],[0,1,1],[0,0,1]],[[0,0,0],[0,1,1],[1,1,0]]]}"#;

fn primset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primset")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn exp_prints_witness() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig.json", FIG);
    let out = primset(&["exp", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["exponent"], 4);
    assert_eq!(v["witness"], serde_json::json!([0, 1, 0, 1]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fig = write(dir.path(), "fig.json", FIG);
    let imprimitive = write(dir.path(), "perm.json", r#"{"n":2,"matrices":[[[0,1],[1,0]]]}"#);
    let garbage = write(dir.path(), "bad.json", "{not json");

    assert_eq!(primset(&["exp", &imprimitive]).status.code(), Some(1));
    assert_eq!(primset(&["primitive", &imprimitive]).status.code(), Some(1));
    assert_eq!(primset(&["exp", &garbage]).status.code(), Some(2));
    assert_eq!(primset(&["exp", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(primset(&["exp", &fig, "--cap", "3"]).status.code(), Some(3));
    assert_eq!(primset(&["reduce", "sandwich", &fig, "--letter-cap", "1"]).status.code(), Some(3));
    assert_eq!(primset(&["reduce", "sink2nz", &fig]).status.code(), Some(2));
    assert_eq!(primset(&["bounds", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn thresholds_of_cerny() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let g = primset(&["gen", "cerny", "--n", "4", "--count", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(g.status.code(), Some(0));
    let f = out.join("cerny_0000.paut");
    let rt = primset(&["rt", f.to_str().unwrap()]);
    assert_eq!(json(&rt)["rt"], 9);
    let car = primset(&["car", f.to_str().unwrap()]);
    assert_eq!(json(&car)["car"], 9);
}

#[test]
fn primitive_with_partition_certificate() {
    let dir = tempfile::tempdir().unwrap();
    // the 4-cycle permutes the parity classes
    let cycle = write(
        dir.path(),
        "cycle.json",
        r#"{"n":4,"matrices":[[[0,1,0,0],[0,0,1,0],[0,0,0,1],[1,0,0,0]]]}"#,
    );
    let out = primset(&["primitive", &cycle, "--pv"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["primitive"], false);
    assert_eq!(v["pv_certificate"]["partition"], serde_json::json!([[0, 2], [1, 3]]));
}

#[test]
fn reduce_certificate_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let fig = write(dir.path(), "fig.json", FIG);
    let out = primset(&["reduce", "SANDWICH", &fig]);
    assert_eq!(out.status.code(), Some(0));
    let cert = primset::reductions::ReductionCertificate::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(cert.all_pass());
    assert!(cert.recheck(true).ok());
}

#[test]
fn bounds_table_and_json() {
    let out = primset(&["bounds", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("kari") && l.trim_end().ends_with(" 7")));
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    let kari = last["bounds"].as_array().unwrap().iter().find(|r| r["name"] == "kari").unwrap();
    assert_eq!(kari["value"], 7);
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "sandwich", "--n", "4", "--samples", "10", "--seed", "7", "--json", "--no-timestamp"];
    let a = primset(&args);
    let b = primset(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["passed"], 10);

    let csv = primset(&["verify", "transversal", "--n", "6", "--csv", "--no-timestamp"]);
    assert_eq!(csv.status.code(), Some(0));
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("claim,index,n,size,outcome"));
}

#[test]
fn gen_round_trips_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["random-nz-set", "random-partial-aut", "random-sink-aut", "random-total-support-set"] {
        let out = dir.path().join(family);
        let o = out.to_str().unwrap();
        let g = primset(&["gen", family, "--n", "5", "--n-min", "2", "--count", "5", "--seed", "11", "--out", o]);
        assert_eq!(g.status.code(), Some(0), "{family}");
        let mut files: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
        files.retain(|p| p.file_name().unwrap() != "corpus.json");
        assert_eq!(files.len(), 5);
        for f in files {
            let text = fs::read_to_string(&f).unwrap();
            let again = match f.extension().unwrap().to_str().unwrap() {
                "json" => MatrixSet::from_json(&text).unwrap().to_json(),
                _ => PartialAutomaton::from_paut(&text).unwrap().to_paut(),
            };
            assert_eq!(again, text);
        }

        // same seed, same bytes
        let again = dir.path().join(format!("{family}-again"));
        primset(&["gen", family, "--n", "5", "--n-min", "2", "--count", "5", "--seed", "11", "--out", again.to_str().unwrap()]);
        for e in fs::read_dir(&out).unwrap() {
            let p = e.unwrap().path();
            assert_eq!(fs::read(&p).unwrap(), fs::read(again.join(p.file_name().unwrap())).unwrap());
        }
    }
}
