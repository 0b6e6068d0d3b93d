use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dmqkd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmqkd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn setup(name: &str, config: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(name), config).unwrap();
    dir
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let header: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    data_rows(csv).iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn converge_single_order_gives_one_row() {
    let dir = setup("c.json", r#"{"mbar":1,"orders":[4]}"#);
    let out = dmqkd(&["converge", "--config", "c.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/converge.csv")).unwrap();
    assert!(csv.starts_with("# tool=dmqkd "));
    assert!(csv.lines().next().unwrap().contains("config_sha256="));
    assert_eq!(data_rows(&csv).len(), 1);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/converge.json")).unwrap())
            .unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 1);
    assert_eq!(json["rows"][0]["m"], 4);
}

#[test]
fn converge_sweep_trace_distance_decreases() {
    let dir = setup("c.json", r#"{"mbar":1,"orders":[2,4,8,16],"dim":48,"branches":2}"#);
    let out = dmqkd(&["converge", "--config", "c.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("o/converge.csv")).unwrap();
    let header = csv.lines().nth(1).unwrap();
    assert!(header.starts_with(
        "m,mbar,dim,trace_dist,tail_eps,bound_6eps,spectral_dist,eig_gap_0,eig_gap_1,proj_gap_0,proj_gap_1"
    ));
    let td = column(&csv, "trace_dist");
    assert_eq!(td.len(), 4);
    assert!(td.windows(2).all(|w| w[1] < w[0]), "{td:?}");
}

#[test]
fn negative_mbar_is_a_config_error() {
    let dir = setup("c.json", r#"{"mbar":-1,"orders":[2]}"#);
    let out = dmqkd(&["converge", "--config", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mbar"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = setup("c.json", r#"{"mbar":1,"orders":[2],"seeed":4}"#);
    let out = dmqkd(&["converge", "--config", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn covariance_records_w_and_tracks_epr() {
    let dir = setup(
        "v.json",
        r#"{"mbar":1,"orders":[16],"dim":48,"tau":1,"xi":0,"w":0.25}"#,
    );
    let out = dmqkd(&["covariance", "--config", "v.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("o/covariance.csv")).unwrap();
    let meta = csv.lines().next().unwrap();
    assert!(meta.contains(" w=0.25"));
    assert!(meta.contains("vb_convention="));
    assert_eq!(column(&csv, "w"), vec![0.25]);

    let dir = setup("v.json", r#"{"mbar":1,"orders":[16],"dim":48,"tau":1,"xi":0}"#);
    dmqkd(&["covariance", "--config", "v.json", "--out", "o"], dir.path());
    let csv = fs::read_to_string(dir.path().join("o/covariance.csv")).unwrap();
    let z = column(&csv, "z_star")[0];
    assert!((z - 2.0 * 2f64.sqrt()).abs() / (2.0 * 2f64.sqrt()) < 1e-3, "{z}");
}

#[test]
fn covariance_truncation_is_a_numeric_error() {
    let dir = setup("v.json", r#"{"mbar":1,"orders":[4],"dim":6,"tau":1,"xi":0}"#);
    let out = dmqkd(&["covariance", "--config", "v.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TruncationTooSevere"));
}

#[test]
fn security_budget_json() {
    let dir = setup("s.json", r#"{"mbar":1,"dim":20,"eps_tilde":0}"#);
    let out = dmqkd(&["security", "--config", "s.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["eps_total"].as_f64().unwrap(), 2f64.powi(-19));
    assert_eq!(v["eps_test_note"], "up-to-constant");

    let dir = setup("s.json", r#"{"mbar":2.5,"eps_target":1e-6,"eps_tilde":1e-9}"#);
    let out = dmqkd(&["security", "--config", "s.json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dim"], 42);
}

const SIM: &str = r#"{"constellation":{"order":4,"mbar":1.0},
    "channel":{"tau":0.5,"xi":0.05},"rounds":2000,"test_fraction":0.5,"seed":3,
    "per_round_csv":true}"#;

#[test]
fn simulate_is_reproducible_and_seed_overridable() {
    let dir = setup("r.json", SIM);
    for out in ["a", "b"] {
        let o = dmqkd(&["simulate", "--config", "r.json", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |p: &str| fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a/rounds.csv"), read("b/rounds.csv"));
    assert_eq!(read("a/simulate.json"), read("b/simulate.json"));

    let rounds = String::from_utf8(read("a/rounds.csv")).unwrap();
    assert_eq!(
        rounds.lines().nth(1).unwrap(),
        "x_re,x_im,y_re,y_im,test_flag,decision_map,decision_md"
    );
    assert_eq!(data_rows(&rounds).len(), 2000);

    dmqkd(&["simulate", "--config", "r.json", "--out", "c", "--seed", "4"], dir.path());
    assert_ne!(read("a/rounds.csv"), read("c/rounds.csv"));
    assert!(String::from_utf8(read("c/rounds.csv")).unwrap().lines().next().unwrap().contains("seed=4"));
}

#[test]
fn simulate_without_seed_is_a_config_error() {
    let dir = setup("r.json", &SIM.replace(r#""seed":3,"#, ""));
    let out = dmqkd(&["simulate", "--config", "r.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = dmqkd(&["simulate", "--config", "r.json", "--out", "o", "--seed", "8"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn simulate_from_constellation_file() {
    let dir = setup(
        "qpsk.json",
        r#"{"points":[[1,1],[1,-1],[-1,1],[-1,-1]],"probs":[0.25,0.25,0.25,0.25],"meta":{}}"#,
    );
    fs::write(
        dir.path().join("r.json"),
        r#"{"constellation":{"file":"qpsk.json"},"channel":{"tau":0.9,"xi":0.0},
            "rounds":1000,"test_fraction":0.3,"seed":1}"#,
    )
    .unwrap();
    let out = dmqkd(&["simulate", "--config", "r.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/simulate.json")).unwrap())
            .unwrap();
    // uniform priors: both decision rules coincide
    assert_eq!(v["result"]["ser_map"], v["result"]["ser_md"]);
    assert!(!dir.path().join("o/rounds.csv").exists());
}
