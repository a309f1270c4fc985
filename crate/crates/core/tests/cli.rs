use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn mwgap(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mwgap"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut input = child.stdin.take().unwrap();
        input.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn build(args: &[&str]) -> String {
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    let o = mwgap(&full, None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn build_then_lpc() {
    let w3 = build(&["--weights", "w3", "--n", "9", "--k", "3"]);
    let o = mwgap(&["lpc"], Some(&w3));
    assert_eq!(stdout(&o).trim(), "\"8/9\"");
    let fk = build(&["--weights", "fk"]);
    let o = mwgap(&["lpc", "-"], Some(&fk));
    assert_eq!(stdout(&o).trim(), "\"7/8\"");
}

#[test]
fn certify_pass_and_fail_exit_codes() {
    let w3 = build(&["--weights", "w3", "--n", "9"]);
    let o = mwgap(&["certify", "--family", "nonopposite", "--target", "1"], Some(&w3));
    assert_eq!(o.status.code(), Some(0));
    let cert: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["pass"], true);
    assert_eq!(cert["pairwise"]["12"], "1/3");
    let o = mwgap(&["certify", "--target", "3/2"], Some(&w3));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mwgap(&["nonsense"], None).status.code(), Some(2));
    assert_eq!(mwgap(&["build", "--weights", "w3", "--n", "4"], None).status.code(), Some(2));
    assert_eq!(mwgap(&["build", "--weights", "w3"], None).status.code(), Some(2));
    assert_eq!(mwgap(&["lpc"], Some("{not json")).status.code(), Some(2));
    assert_eq!(mwgap(&["ledger", "--criterion", "11"], None).status.code(), Some(2));
    assert_eq!(mwgap(&["--help"], None).status.code(), Some(0));
}

#[test]
fn files_and_brute() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("w3.json");
    let o = mwgap(&["build", "--weights", "w3", "--n", "3", "--out", inst.to_str().unwrap()], None);
    assert!(o.status.success());
    let o = mwgap(&["brute", inst.to_str().unwrap(), "--family", "nonopposite"], None);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["min"], "1/1");
    // the reported minimum cut feeds back into the svg overlay
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, v["cut"].to_string()).unwrap();
    let o = mwgap(&["svg", inst.to_str().unwrap(), "--cut", cut.to_str().unwrap(), "--potential", "2"], None);
    assert!(o.status.success());
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.contains("<circle") && svg.contains("<text"));
    assert_eq!(mwgap(&["svg", inst.to_str().unwrap(), "--potential", "4"], None).status.code(), Some(2));
}

#[test]
fn project_reports_kway_cut() {
    let w = build(&["--weights", "wtilde", "--k", "5", "--n", "3"]);
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("w.json");
    std::fs::write(&inst, &w).unwrap();
    // argmax-style cut: every point goes to its first largest coordinate
    let grid_points: Vec<Value> = serde_json::from_str::<Value>(&w).unwrap()["weights"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|e| [e["u"].clone(), e["v"].clone()])
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    let labels: Vec<Value> = grid_points
        .into_iter()
        .filter(|x| seen.insert(x.to_string()))
        .map(|x| {
            let c: Vec<u64> = x.as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
            let max = *c.iter().max().unwrap();
            let label = c.iter().position(|&v| v == max).unwrap() + 1;
            serde_json::json!({ "x": c, "c": label })
        })
        .collect();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, serde_json::json!({ "k": 5, "n": 3, "labels": labels }).to_string()).unwrap();
    let o = mwgap(&["project", inst.to_str().unwrap(), "--cut", cut.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["projection"]["triples"], 10);
}

#[test]
fn seeded_round_is_reproducible() {
    let args = ["--threads", "2", "--bundle", "round", "--n", "3", "--samples", "2000", "--seed", "7"];
    let a = stdout(&mwgap(&args, None));
    let b = stdout(&mwgap(&args, None));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seeds"][0], 7);
    assert!(v["output"]["tau_hat"].as_f64().unwrap() > 0.0);
    assert_eq!(mwgap(&["round", "--n", "3", "--samples", "10"], None).status.code(), Some(2));
}

#[test]
fn lpsearch_small() {
    let o = mwgap(&["lpsearch", "--n", "3"], None);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["certified"], true);
    assert_eq!(v["k"], 3);
    // the emitted weights are themselves a valid instance
    let o = mwgap(&["certify", "--target", "1"], Some(&stdout(&o)));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn single_ledger_criterion() {
    let o = mwgap(&["ledger", "--criterion", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("criterion  1 [PASS]"));
}
