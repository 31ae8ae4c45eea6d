use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horosphere")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["count-rq", "--q", "6", "--d", "2"]).trim(), "24");
    let k: f64 = stdout(&["kloosterman", "--a", "1", "--b", "2", "--q", "3"]).trim().parse().unwrap();
    assert!((k - 2.0).abs() < 1e-9);
    let d = json(&["diam", "--q", "7", "--a", "1"]);
    assert_eq!(d["diam"], 3);
    assert_eq!(d["q"], 7);
}

#[test]
fn ramanujan_and_weil() {
    assert_eq!(stdout(&["ramanujan", "--n", "1", "--q", "12"]).trim(), "0");
    assert_eq!(stdout(&["ramanujan", "--n", "-2", "--q", "6"]).trim(), "-1");
    let w = json(&["weil-check", "--q", "49"]);
    assert_eq!(w["violations"], 0);
    assert_eq!(w["checked"], 49 * 49);
}

#[test]
fn structured_outputs() {
    let c = json(&["cosets", "--q", "4", "--d", "2"]);
    assert_eq!(c["index"], 6);
    assert_eq!(c["cosets"].as_array().unwrap().len(), 6);
    let h = json(&["hecke-test", "--q", "3", "--d", "3", "--kind", "all", "--norm", "linf", "--radius", "0.9"]);
    assert_eq!(h["index"], 13);
    for key in ["q", "d", "average", "reference", "abs_deviation"] {
        assert!(h.get(key).is_some(), "missing {key}");
    }
    let r = json(&["covering-radius", "--basis", "2,0;0,3"]);
    assert!((r["lo"].as_f64().unwrap() - 2.5).abs() < 1e-3);
    assert!(r["deep_hole"].is_array() && r["cells_explored"].is_u64());
    let s = json(&["sublattice", "--q", "5", "--a", "1,2"]);
    assert_eq!(s["basis"], serde_json::json!([[5, 0], [3, 1]]));
    let p = json(&["parametrize", "--q", "12", "--a", "4,9"]);
    assert_eq!(p["roundtrip"], true);
    let m = json(&["horosphere-rep", "--q", "5", "--a", "3"]);
    assert_eq!(m["matrix"], serde_json::json!([[-1, 2], [-3, 5]]));
    let t = json(&["torus-average", "--q", "7", "--n", "0,14"]);
    assert_eq!(t["re"], 1.0);
}

#[test]
fn sample_dump_header() {
    let csv = stdout(&["distribution", "--q", "31", "--d", "3", "--n-samples", "5", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "q,a1,a2,a3,diam,rescaled,rho_lo,rho_hi");
    assert_eq!(lines.count(), 5);
}

#[test]
fn report_schema_and_sample_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let r = json(&["convergence", "--d", "2", "--q-list", "31,61", "--n-samples", "10", "--samples-dir", d]);
    assert_eq!(r["meta"]["seed"], 0);
    let results = r["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for res in results {
        let file = res["samples_file"].as_str().unwrap();
        assert_eq!(std::fs::read_to_string(file).unwrap().lines().count(), 11);
        assert!(res["ccdf_grid"][0].get("R").is_some());
        assert!(res["ks_to_ref"].is_f64());
    }
    assert!(r.get("runtime_seconds").is_none());
    let timed = json(&["distribution", "--q", "31", "--d", "2", "--n-samples", "3", "--timing"]);
    assert!(timed["runtime_seconds"].is_f64());
}

#[test]
fn exit_codes() {
    let usage = [
        vec!["diam", "--q", "6", "--a", "2,4"],
        vec!["diam", "--q", "7"],
        vec!["count-rq", "--q", "6"],
        vec!["count-rq", "--q", "6", "--d", "2", "--format", "csv"],
        vec!["covering-radius", "--basis", "1,0;0,1", "--eps", "0"],
        vec!["convergence", "--d", "2", "--q-list", "31"],
        vec!["no-such-command"],
    ];
    for args in usage {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(!err.trim().is_empty());
    }
    let caps = [
        vec!["enumerate-rq", "--q", "1000", "--d", "3"],
        vec!["cosets", "--q", "1000", "--d", "3"],
        vec!["covering-radius", "--basis", "1,0,0,0,0;0,1,0,0,0;0,0,1,0,0;0,0,0,1,0;0,0,0,0,1"],
    ];
    for args in caps {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);
    }
}

#[test]
fn flag_errors_name_the_flag() {
    let out = run(&["diam", "--q", "7", "--a", "1,2", "--d", "3"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("--a"));
    let out = run(&["kloosterman", "--a", "x", "--b", "1", "--q", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("--a"));
}

#[test]
fn every_subcommand_has_help() {
    let subcommands = [
        "count-rq", "enumerate-rq", "kloosterman", "ramanujan", "weil-check", "cosets", "parametrize",
        "horosphere-rep", "hecke-test", "sublattice", "covering-radius", "diam", "sandwich-check",
        "torus-average", "lattice-average", "distribution", "convergence",
    ];
    let top = stdout(&["--help"]);
    for s in subcommands {
        assert!(top.contains(s), "{s} missing from --help");
        let help = stdout(&[s, "--help"]);
        assert!(help.contains("Usage:") && help.contains("--seed"), "{s}");
    }
}

#[test]
fn out_writes_file_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let out = run(&["count-rq", "--q", "10", "--d", "3", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "868\n");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
