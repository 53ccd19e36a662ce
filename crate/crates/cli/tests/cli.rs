use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn espec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_espec"))
        .args(args)
        .env("ESPEC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = espec(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok_stdout(args)).expect("json document")
}

fn exit_code(args: &[&str]) -> i32 {
    espec(args).status.code().expect("exit code")
}

#[test]
fn free_large_ring_is_sixteenfold() {
    let doc = json(&["free", "--L", "200", "--LA", "100", "--dt", "-0.2"]);
    assert_eq!(doc["signature"]["tag"], "Sixteenfold");
    assert_eq!(doc["signature"]["ground_multiplicity"], 16);
    assert_eq!(doc["phase"], "II");
    // edge modes 50 sites apart hybridize at the 1e-5 level
    let doc = json(&["free", "--L", "200", "--LA", "50", "--dt", "-0.2", "--rel-tol", "1e-4"]);
    assert_eq!(doc["signature"]["tag"], "Sixteenfold");
    let split = doc["signature"]["splitting"].as_f64().unwrap();
    assert!(split > 1e-7 && split < 1e-5, "{split}");
    let doc = json(&["free", "--L", "200", "--dt", "0.2"]);
    assert_eq!(doc["signature"]["tag"], "NonDegenerate");
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["free", "--L", "7", "--dt", "-0.4"]), 2);
    assert_eq!(exit_code(&["ed", "--L", "8", "--dt", "-0.4", "--U", "3", "--max-iter", "5"]), 3);
    assert_eq!(exit_code(&["free", "--L", "8", "--dt", "0"]), 4);
    assert_eq!(exit_code(&["ed", "--L", "8", "--dt", "0", "--U", "0"]), 5);
    assert_eq!(exit_code(&["ed", "--L", "8", "--dt", "-0.4", "--U", "3", "--sector-cap", "10"]), 6);
    assert_ne!(exit_code(&["free", "--L", "8", "--dt", "-0.4", "--bogus"]), 0);
}

#[test]
fn ed_trivial_side_is_nondegenerate() {
    let doc = json(&["ed", "--L", "8", "--dt", "0.4", "--U", "3"]);
    assert_eq!(doc["signature"]["tag"], "NonDegenerate");
    assert_eq!(doc["phase"], "I");
    let md = &doc["metadata"];
    assert_eq!(md["engine"], "ed");
    assert!(md["residual"].as_f64().unwrap() < 1e-10);
    assert!(md["gap"].as_f64().unwrap() > 0.1);
}

fn weights_by_label(doc: &Value, floor: f64) -> Vec<(u64, u64, f64)> {
    let mut v: Vec<(u64, u64, f64)> = doc["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| {
            (
                l["n_up"].as_u64().unwrap(),
                l["n_down"].as_u64().unwrap(),
                l["weight"].as_f64().unwrap(),
            )
        })
        .filter(|l| l.2 > floor)
        .collect();
    v.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
    v
}

#[test]
fn engines_agree_without_interaction() {
    let common = ["--L", "8", "--LA", "4", "--dt", "-0.4"];
    let free = json(&[&["free", "--xi-window", "1000"][..], &common].concat());
    let ed = json(&[&["ed", "--U", "0"][..], &common].concat());
    let a = weights_by_label(&free, 1e-10);
    let b = weights_by_label(&ed, 1e-10);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.0, x.1), (y.0, y.1));
        assert!((x.2 - y.2).abs() < 1e-9, "{x:?} {y:?}");
    }
}

fn scan_into(dir: &Path, workers: &str) {
    let out = espec(&[
        "scan", "--L", "8", "--LA", "4", "--dt=-0.4,0.4", "--U=-3,0,3", "--engine", "ed", "--workers", workers,
        "--matrix", "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn scan_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let runs = [("a", "1"), ("b", "4"), ("c", "1")];
    for (name, workers) in runs {
        scan_into(&tmp.path().join(name), workers);
    }
    let read = |run: &str, file: &str| std::fs::read(tmp.path().join(run).join(file)).unwrap();
    for file in ["phase_diagram.csv", "phase_diagram.json", "multiplicity.dat"] {
        assert_eq!(read("a", file), read("b", file), "{file} differs across worker counts");
        assert_eq!(read("a", file), read("c", file), "{file} differs across reruns");
    }
    let csv = String::from_utf8(read("a", "phase_diagram.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("schema_version,delta_t,U,"));
    let timing = String::from_utf8(read("a", "timing.csv")).unwrap();
    assert_eq!(timing.lines().count(), 7);
}

#[test]
fn scan_records_failed_points_and_continues() {
    let out = ok_stdout(&["scan", "--L", "8", "--dt=0,-0.4", "--U=0", "--engine", "free"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",GaplessError:"), "{}", rows[0]);
    assert!(rows[1].contains("Sixteenfold"));
}

#[test]
fn validate_passes() {
    let out = ok_stdout(&["validate"]);
    let passes = out.lines().filter(|l| l.starts_with("PASS")).count();
    assert!(passes >= 6, "{out}");
    assert!(!out.lines().any(|l| l.starts_with("FAIL")), "{out}");
}

#[test]
fn document_reproduces_from_its_metadata() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first.json");
    ok_stdout(&["ed", "--L", "6", "--LA", "2", "--dt", "-0.3", "--U", "2", "--seed", "17", "--out", first.to_str().unwrap()]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let md = &doc["metadata"];
    let num = |v: &Value| v.to_string();
    let again = json(&[
        "ed",
        "--L", &num(&md["params"]["L"]),
        "--LA", &num(&md["cut"]["L_A"]),
        "--t", &num(&md["params"]["t"]),
        "--dt", &num(&md["params"]["delta_t"]),
        "--U", &num(&md["params"]["U"]),
        "--seed", &num(&md["seed"]),
        "--rel-tol", &num(&md["settings"]["rel_tol"]),
    ]);
    assert_eq!(doc["levels"], again["levels"]);
    assert_eq!(doc["signature"], again["signature"]);
    assert_eq!(md["energies"], again["metadata"]["energies"]);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "L = 8\nLA = 4\ndt = -0.4\nrel-tol = 1e-3\n").unwrap();
    let doc = json(&["free", "--config", cfg.to_str().unwrap(), "--dt", "0.4"]);
    assert_eq!(doc["metadata"]["params"]["L"], 8);
    assert_eq!(doc["metadata"]["params"]["delta_t"], 0.4);
    assert_eq!(doc["metadata"]["settings"]["rel_tol"], 1e-3);

    std::fs::write(&cfg, "L = 8\nunknown-key = 1\n").unwrap();
    assert_ne!(exit_code(&["free", "--config", cfg.to_str().unwrap(), "--dt", "0.4"]), 0);
}

#[test]
fn csv_and_plot_outputs() {
    let out = ok_stdout(&["free", "--L", "8", "--dt", "-0.4", "--format", "csv"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("xi,n_up,n_down,weight"));
    assert!(lines.count() >= 16);

    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("es.csv");
    ok_stdout(&["free", "--L", "8", "--dt", "-0.4", "--plot", table.to_str().unwrap()]);
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("n_total,xi\n"));
    // the sixteen ground levels carry 2..=6 particles
    let mut counts = std::collections::BTreeMap::new();
    for row in text.lines().skip(1).take(16) {
        *counts.entry(row.split(',').next().unwrap().to_string()).or_insert(0) += 1;
    }
    let expect: std::collections::BTreeMap<String, i32> =
        [("2", 1), ("3", 4), ("4", 6), ("5", 4), ("6", 1)].map(|(k, v)| (k.to_string(), v)).into();
    assert_eq!(counts, expect);
    let scripts: Vec<_> = std::fs::read_dir(tmp.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "gp"))
        .collect();
    assert_eq!(scripts.len(), 1);
}
