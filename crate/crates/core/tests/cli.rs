use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hemodyn::cli::{resolve, Source};

fn hemodyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hemodyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_rows(text: &str) -> (Vec<String>, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|r| r.unwrap()).collect();
    (header, rows)
}

#[test]
fn hopf_reports_single_crossing() {
    let out = hemodyn(&[
        "hopf", "--delta", "0.05", "--beta0", "1.77", "--theta", "1.62e8", "--n", "3", "--tau-min",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_rows(&stdout(&out));
    assert_eq!(header, ["index", "branch", "tau_c", "omega_c", "y", "transversality"]);
    assert_eq!(rows.len(), 1);
    let tau_c: f64 = rows[0][2].parse().unwrap();
    let omega_c: f64 = rows[0][3].parse().unwrap();
    assert!((tau_c - 18.1269753).abs() < 1e-6);
    assert!((omega_c - 0.137975763).abs() < 1e-8);
    assert_eq!(&rows[0][5], "+1");
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau_0"));
}

#[test]
fn equilibria_reports_absent_positive() {
    let out = hemodyn(&[
        "equilibria", "--delta", "0.05", "--beta0", "0.03", "--theta", "1.62e8", "--n", "3",
        "--tau-min", "0", "--tau", "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = read_rows(&stdout(&out));
    assert_eq!(&rows[0][0], "0");
    assert_eq!(&rows[0][1], "");
    assert!(rows[0][2].contains("absent"));
}

#[test]
fn exit_codes() {
    // tau <= tau_min
    assert_eq!(hemodyn(&["simulate", "--tau-min", "5", "--tau", "5"]).status.code(), Some(2));
    assert_eq!(hemodyn(&["simulate", "--delta", "abc"]).status.code(), Some(2));
    assert_eq!(hemodyn(&["sweep", "--tau-from", "16"]).status.code(), Some(2));
    assert_eq!(hemodyn(&["bogus"]).status.code(), Some(2));
    assert_eq!(hemodyn(&["hopf", "--tau-min", "1"]).status.code(), Some(3));
    // R = 2 exactly: δ + β* = 0
    assert_eq!(hemodyn(&["hopf", "--beta0", "0.15"]).status.code(), Some(3));
    assert_eq!(hemodyn(&["hopf", "--beta0", "0.03"]).status.code(), Some(2));
    let bad_out = hemodyn(&["linearize", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(bad_out.status.code(), Some(4));
    assert!(!bad_out.stderr.is_empty());
    assert_eq!(hemodyn(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_writes_full_grid_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = hemodyn(&[
        "simulate", "--tau", "18.2", "--dt", "0.05", "--t-end", "1000", "--history", "const:1e8",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,x,z\n0,1.00000000e8,"));
    assert!(!text.contains('\r'));
    let (header, rows) = read_rows(&text);
    assert_eq!(header, ["t", "x", "z"]);
    assert_eq!(rows.len(), 20_001);
    let last_t: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert_eq!(last_t, 1000.0);
    for r in &rows {
        for cell in r.iter() {
            let v: f64 = cell.parse().unwrap();
            assert!(v.is_finite());
        }
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = ["sweep", "--tau-from", "17", "--tau-to", "19", "--steps", "5"];
    let a = hemodyn(&args);
    let b = hemodyn(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (header, rows) = read_rows(&stdout(&a));
    assert_eq!(header, ["tau", "classification", "period", "final_mean", "predicted"]);
    let predicted: Vec<&str> = rows.iter().map(|r| r.get(4).unwrap()).collect();
    assert_eq!(predicted, ["stable", "stable", "stable", "unstable", "unstable"]);
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    write(&cfg, "# model\ndelta = 0.1\nbeta0=2.0\ntau_min = 0\nsteps = 3 # sweep only\n");
    let cfg_s = cfg.to_str().unwrap();
    let plan = resolve(["hemodyn", "linearize", "--config", cfg_s, "--delta", "0.2"]).unwrap();
    assert_eq!(plan.params.delta, 0.2);
    assert_eq!(plan.params.beta0, 2.0);
    assert_eq!(plan.params.n, 3.0);
    assert_eq!(plan.sources["delta"], Source::Flag);
    assert_eq!(plan.sources["beta0"], Source::Config);
    assert_eq!(plan.sources["n"], Source::Default);
    for key in ["delta", "beta0", "theta", "n", "tau-min", "tau"] {
        assert!(plan.sources.contains_key(key), "{key} unresolved");
    }

    let out = hemodyn(&["linearize", "--config", cfg_s]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = read_rows(&stdout(&out));
    // R = 3·(2 − 0.1)/2
    let ratio: f64 = rows[0][2].parse().unwrap();
    assert!((ratio - 2.85).abs() < 1e-8);

    write(&cfg, "delta = 0.1\nwat = 1\n");
    assert_eq!(hemodyn(&["linearize", "--config", cfg_s]).status.code(), Some(2));
    write(&cfg, "delta = zero\n");
    assert_eq!(hemodyn(&["linearize", "--config", cfg_s]).status.code(), Some(2));
    assert_eq!(
        hemodyn(&["linearize", "--config", "/nonexistent.conf"]).status.code(),
        Some(2)
    );
}

#[test]
fn history_table_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("phi.csv");
    write(&table, "t,x\n-20,2e8\n-10,2.5e8\n0,3e8\n");
    let out = hemodyn(&[
        "simulate", "--tau", "18.2", "--t-end", "10",
        "--history", &format!("file:{}", table.display()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = read_rows(&stdout(&out));
    assert_eq!(&rows[0][1], "3.00000000e8");

    // table too short to cover [-tau, 0]
    write(&table, "-5 1e8\n0 1e8\n");
    let out = hemodyn(&[
        "simulate", "--tau", "18.2", "--history", &format!("file:{}", table.display()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chareq_vanishes_at_crossing() {
    let out = hemodyn(&[
        "chareq", "--tau", "18.126975284410388", "--lambda-re", "0", "--lambda-im",
        "0.13797576280676303",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_rows(&stdout(&out));
    assert_eq!(header.last().map(String::as_str), Some("abs"));
    let abs: f64 = rows[0][5].parse().unwrap();
    assert!(abs < 1e-9);
}
