use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crossrelax"))
}

fn run_with_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crossrelax-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn edge_cover_pipeline_is_tight() {
    let gen = bin().args(["gen", "edge-cover", "--n", "1"]).output().unwrap();
    assert_eq!(gen.status.code(), Some(0));
    let solved = run_with_stdin(&["solve-intersection", "--verify"], &gen.stdout);
    assert_eq!(solved.status.code(), Some(0), "{}", String::from_utf8_lossy(&solved.stderr));
    let rep = json(&solved.stdout);
    assert_eq!(rep["schema"], 1);
    let checks = rep["checks"].as_array().unwrap();
    let tight = checks.iter().filter(|c| {
        c["name"].as_str().unwrap().starts_with("constraint_") && c["bound"]["exact"] == c["achieved"]["exact"]
    });
    assert!(tight.count() >= 1, "{checks:?}");
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn missing_input_exits_2() {
    let out = bin().args(["solve-mcst", "--in", "missing.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bin().args(["solve-everything"]).output().unwrap().status.code(), Some(2));
    let bad = run_with_stdin(&["solve-mcst"], b"{ not json");
    assert_eq!(bad.status.code(), Some(2));
    let gen = bin().args(["gen", "edge-cover", "--n", "1"]).output().unwrap();
    let wrong = run_with_stdin(&["solve-mcst"], &gen.stdout);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let inst = tmp("rand.json");
    let gen = bin()
        .args(["gen", "random", "--kind", "mcst", "--seed", "11", "--index", "3", "--out"])
        .arg(&inst)
        .output()
        .unwrap();
    assert_eq!(gen.status.code(), Some(0));
    let a = bin().args(["solve-mcst", "--verify", "--in"]).arg(&inst).output().unwrap();
    let b = bin().args(["solve-mcst", "--verify", "--in"]).arg(&inst).output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a.stdout)["timing_seconds"].is_null());
    let timed = bin().args(["solve-mcst", "--timing", "--in"]).arg(&inst).output().unwrap();
    assert!(json(&timed.stdout)["timing_seconds"].is_number());
}

#[test]
fn verify_rechecks_a_reported_solution() {
    let inst = tmp("lat.json");
    let rep = tmp("lat-report.json");
    bin().args(["gen", "random", "--kind", "lattice", "--seed", "4", "--out"]).arg(&inst).output().unwrap();
    let solved = bin().args(["solve-lattice", "--in"]).arg(&inst).arg("--out").arg(&rep).output().unwrap();
    assert_eq!(solved.status.code(), Some(0), "{}", String::from_utf8_lossy(&solved.stderr));
    let ok = bin().args(["verify", "--in"]).arg(&inst).arg("--solution").arg(&rep).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    // Emptying the solution must fail the coverage check.
    let mut v = json(&std::fs::read(&rep).unwrap());
    v["outcome"]["solution"] = serde_json::json!([]);
    let broken = tmp("lat-broken.json");
    std::fs::write(&broken, v.to_string()).unwrap();
    let bad = bin().args(["verify", "--in"]).arg(&inst).arg("--solution").arg(&broken).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn mcst_trace_round_trips_through_verify() {
    let inst = tmp("tree.json");
    let rep = tmp("tree-report.json");
    let trace = tmp("tree-trace.jsonl");
    bin().args(["gen", "random", "--kind", "mcst", "--seed", "9", "--out"]).arg(&inst).output().unwrap();
    let solved = bin()
        .args(["solve-mcst", "--in"])
        .arg(&inst)
        .arg("--report")
        .arg(&rep)
        .arg("--trace")
        .arg(&trace)
        .output()
        .unwrap();
    assert_eq!(solved.status.code(), Some(0));
    let ok = bin()
        .args(["verify", "--in"])
        .arg(&inst)
        .arg("--solution")
        .arg(&rep)
        .arg("--trace")
        .arg(&trace)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let checks = json(&ok.stdout)[0]["checks"].as_array().unwrap().clone();
    assert!(checks.iter().any(|c| c["name"] == "guarantee_verifier_failures"));
}

#[test]
fn batch_verify_in_parallel() {
    let mut paths = Vec::new();
    for i in 0..4 {
        let p = tmp(&format!("batch-{i}.json"));
        let kind = ["mcst", "intersection", "lattice", "mcst"][i];
        bin().args(["gen", "random", "--kind", kind, "--seed", "21", "--index", &i.to_string(), "--out"]).arg(&p).output().unwrap();
        paths.push(p);
    }
    let mut cmd = bin();
    cmd.args(["verify", "--jobs", "2"]);
    for p in &paths {
        cmd.arg("--in").arg(p);
    }
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out.stdout).as_array().unwrap().len(), 4);
}

#[test]
fn generators_write_reports() {
    let rep = tmp("gap-report.json");
    let out = bin().args(["gen", "mcst-gap", "--e", "4", "--report"]).arg(&rep).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = json(&std::fs::read(&rep).unwrap());
    assert_eq!(r["integral_min_violation"], "1/1");
    let planar = bin().args(["gen", "planar-gap", "--k", "2", "--report"]).arg(&rep).output().unwrap();
    assert_eq!(planar.status.code(), Some(0));
    let red = bin()
        .args(["gen", "reduction", "--e", "3", "--t", "2", "--bound", "0,1:1", "--report"])
        .arg(&rep)
        .output()
        .unwrap();
    assert_eq!(red.status.code(), Some(0));
    assert_eq!(json(&std::fs::read(&rep).unwrap())["feasible_basis"], serde_json::json!([0, 2]));
    assert_eq!(bin().args(["gen", "mcst-gap", "--e", "6"]).output().unwrap().status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let out = bin().arg("selftest").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let results = json(&out.stdout);
    assert_eq!(results.as_array().unwrap().len(), 9);
}
