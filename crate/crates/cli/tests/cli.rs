use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lcft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcft")).args(args).output().expect("binary runs")
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn record(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("run_record.json")).unwrap()).unwrap()
}

const MOMENTS: &str = r#"
kind = "gmc-moments"
seed = 5
[gmc-moments]
gamma = 0.5
moments = [0.0, 1.0, 2.0]
samples = 400
geometry = "circle"
cutoff = 32
"#;

#[test]
fn dozz_table_matches_golden_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = repo().join("configs/dozz_golden.toml");
    let out = lcft(&["dozz", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got = std::fs::read(tmp.path().join("dozz_table.csv")).unwrap();
    let want = std::fs::read(repo().join("crates/core/tests/data/dozz_golden.csv")).unwrap();
    assert!(got == want, "DOZZ table differs from the golden file");
}

#[test]
fn zeroth_moment_is_exactly_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "m.toml", MOMENTS);
    let out = lcft(&["gmc-moments", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("gmc_moments.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "0");
    assert_eq!(row[1], "1");
    assert_eq!(row[2], "0");
}

#[test]
fn reruns_are_identical_up_to_wall_time() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "m.toml", MOMENTS);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let out = lcft(&["gmc-moments", "--config", &cfg, "--out", d.to_str().unwrap(), "--threads", "2"]);
        assert!(out.status.success());
    }
    let strip = |mut v: serde_json::Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    assert_eq!(strip(record(&a)), strip(record(&b)));
    assert_eq!(
        std::fs::read(a.join("gmc_moments.csv")).unwrap(),
        std::fs::read(b.join("gmc_moments.csv")).unwrap()
    );
}

#[test]
fn record_echoes_seed_and_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "m.toml", MOMENTS);
    let out = lcft(&["run", "--config", &cfg, "--out", tmp.path().to_str().unwrap(), "--seed", "11", "--tolerance-scale", "2"]);
    assert!(out.status.success());
    let r = record(tmp.path());
    assert_eq!(r["seed"], 11);
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["tolerance_scale"], 2.0);
    let m = &r["metrics"][2];
    assert_eq!(m["check"]["sigmas"], 6.0);
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn tolerance_failure_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "m.toml", MOMENTS);
    let out = lcft(&["gmc-moments", "--config", &cfg, "--out", tmp.path().to_str().unwrap(), "--tolerance-scale", "1e-9"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(record(tmp.path())["passed"], false);
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.toml", &MOMENTS.replace("samples = 400", "samples = 400\nsampels = 3"));
    let out = lcft(&["gmc-moments", "--config", &bad, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampels"));

    let cfg = write(tmp.path(), "m.toml", MOMENTS);
    let out = lcft(&["crossing", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(lcft(&["dozz"]).status.code(), Some(2));
    assert_eq!(lcft(&["frobnicate"]).status.code(), Some(2));

    let seiberg = r#"
kind = "correlator"
[correlator]
gamma = 1.0
points = [[0.0, 0.0], [1.0, 0.0], "inf"]
weights = [0.5, 0.5, 0.5]
lmax = 8
samples = 4
"#;
    let c = write(tmp.path(), "c.toml", seiberg);
    let out = lcft(&["correlator", "--config", &c, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Seiberg"));
}

#[test]
fn accuracy_errors_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
kind = "bootstrap4pt"
[bootstrap4pt]
gamma = 1.0
alphas = [1.9, 1.8, 1.7, 1.9]
z = [0.8, 0.0]
quadrature = { p_max = 1.0, panels = 2, nodes_per_panel = 8, level = 2 }
"#;
    let c = write(tmp.path(), "b.toml", text);
    let out = lcft(&["bootstrap4pt", "--config", &c, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_max"));
}

#[test]
fn block_writes_level_ledger() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
kind = "block"
[block]
gamma = 1.0
p = 0.8
deltas = [1.2, 1.1, 1.3, 1.0]
z = [0.3, 0.1]
level = 5
"#;
    let c = write(tmp.path(), "b.toml", text);
    let out = lcft(&["block", "--config", &c, "--out", tmp.path().to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("block.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "level,coefficient_re,coefficient_im,partial_re,partial_im");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0,1,0,"));
}

#[test]
fn compare_record_with_itself_and_other_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "m.toml", MOMENTS);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    lcft(&["gmc-moments", "--config", &cfg, "--out", a.to_str().unwrap()]);
    lcft(&["gmc-moments", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "77"]);
    let ra = a.join("run_record.json");
    let rb = b.join("run_record.json");

    let out = lcft(&["compare", ra.to_str().unwrap(), ra.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep["fields"].as_array().unwrap().iter().all(|f| f["diff"] == 0.0));

    // two seeds: estimates judged in combined standard errors
    let out = lcft(&["compare", ra.to_str().unwrap(), rb.to_str().unwrap()]);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let within = rep["fields"].as_array().unwrap().iter().all(|f| f["diff"].as_f64().unwrap() <= 3.0);
    assert_eq!(out.status.code(), Some(if within { 0 } else { 1 }));
    assert!(within);
}

#[test]
fn compare_flags_perturbed_golden_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let golden = repo().join("crates/core/tests/data/dozz_golden.csv");
    let text = std::fs::read_to_string(&golden).unwrap();
    let bad = text.replacen("-5.54779596e+01", "-5.54779597e+01", 1);
    let p = write(tmp.path(), "perturbed.csv", &bad);
    let out = lcft(&["compare", golden.to_str().unwrap(), &p]);
    assert_eq!(out.status.code(), Some(1));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["failures"], serde_json::json!(["row 1 re"]));
}

#[test]
fn compare_rejects_kind_mismatch() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "m.toml", MOMENTS);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    lcft(&["gmc-moments", "--config", &cfg, "--out", a.to_str().unwrap()]);
    let golden = repo().join("configs/dozz_golden.toml");
    lcft(&["dozz", "--config", golden.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    let out = lcft(&["compare", a.join("run_record.json").to_str().unwrap(), b.join("run_record.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
