use std::path::Path;
use std::process::{Command, Output};

fn qfi_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfi-lab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn csv_has_header_and_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "h.csv");
    let o = qfi_lab(&["scan", "h-exps", "--d", "3", "--n-states", "12", "--seed", "5", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# qfi-lab ") && head.contains("command: qfi-lab scan h-exps") && head.ends_with("seed: 5"));
    assert_eq!(lines.next().unwrap(), "d,kind,rank,exp_s,h,s_vn,s_lin");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.iter().filter(|r| r.split(',').nth(1) == Some("random")).count(), 12);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let exp_s: f64 = f[3].parse().unwrap();
        let h: f64 = f[4].parse().unwrap();
        assert!((1.0 - 1e-12..=3.0 + 1e-12).contains(&exp_s) && (1.0 - 1e-12..=3.0 + 1e-12).contains(&h));
        assert_eq!(f[3].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }
}

#[test]
fn seed_changes_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    qfi_lab(&["scan", "h-exps", "--d", "2", "--n-states", "4", "--seed", "1", "--out", &a]);
    qfi_lab(&["scan", "h-exps", "--d", "2", "--n-states", "4", "--seed", "2", "--out", &b]);
    let body = |p: &str| std::fs::read_to_string(p).unwrap().lines().skip(2).collect::<Vec<_>>().join("\n");
    assert_ne!(body(&a), body(&b));
}

#[test]
fn averaged_figures_carry_monte_carlo_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "m.csv");
    let o = qfi_lab(&["scan", "fqmath-exps", "--d", "3", "--n-states", "4", "--samples", "64", "--lambda-grid", "3", "--out", &out]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "d,kind,rank,lambda,exp_s,avg,avg_mc,avg_stderr");
    let last: Vec<f64> = text.lines().last().unwrap().split(',').skip(3).map(|x| x.parse().unwrap()).collect();
    // the Λ = 1/d endpoint: exp S = d and average 2d
    assert!((last[1] - 3.0).abs() < 1e-12 && (last[2] - 6.0).abs() < 1e-12 && (last[3] - 6.0).abs() < 1e-10);
    let o = qfi_lab(&["scan", "avgv-exps", "--d", "3", "--samples", "1", "--out", &out]);
    assert_eq!(code(&o), 2);
}

#[test]
fn gap_reads_json_files() {
    let dir = tempfile::tempdir().unwrap();
    let rho = path(dir.path(), "rho.json");
    let op = path(dir.path(), "a.json");
    std::fs::write(&rho, r#"{"dim": 2, "matrix": [[0.75, 0], [0, 0], [0, 0], [0.25, 0]]}"#).unwrap();
    std::fs::write(&op, r#"{"dim": 2, "matrix": [[0, 0], [1, 0], [1, 0], [0, 0]]}"#).unwrap();
    let o = qfi_lab(&["gap", "--state", &format!("file:{rho}"), "--op", &format!("file:{op}")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // σ_x on diag(3/4, 1/4): variance 1, F_Q = 4·(1/2)² = 1, gap 3/4
    assert!((v["variance"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["qfi"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["gap"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(v["bound_linear_entropy"]["holds"], true);
    assert!((v["rank2_formula"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn mixed_qubit_saturates_the_bound() {
    let o = qfi_lab(&["gap", "--state", "mixed:d=2", "--op", "sz"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["gap"], 1.0);
    assert_eq!(v["bound_linear_entropy"]["saturated"], true);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qfi_lab(&[])), 2);
    assert_eq!(code(&qfi_lab(&["frobnicate"])), 2);
    assert_eq!(code(&qfi_lab(&["--help"])), 0);
    assert_eq!(code(&qfi_lab(&["verify", "nonsense"])), 2);
    assert_eq!(code(&qfi_lab(&["scan", "h-exps", "--d", "1", "--out", &path(dir.path(), "x.csv")])), 2);
    assert_eq!(code(&qfi_lab(&["scan", "h-exps", "--d", "2..x", "--out", "x.csv"])), 2);
    assert_eq!(code(&qfi_lab(&["gap", "--state", "mixed:d=3", "--op", "sz"])), 2);
    assert_eq!(code(&qfi_lab(&["ghz", "--p-grid", "0:2:3", "--out", &path(dir.path(), "g.csv")])), 2);
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&qfi_lab(&["gap", "--state", &format!("file:{bad}"), "--op", "sz"])), 2);
    assert_eq!(code(&qfi_lab(&["gap", "--state", "file:/definitely/missing.json", "--op", "sz"])), 3);
    let unwritable = path(dir.path(), "no/such/dir/out.csv");
    assert_eq!(code(&qfi_lab(&["ghz", "--out", &unwritable])), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_qfi-lab"))
        .args(["verify", "core", "--d", "2", "--cases", "5"])
        .env("QFI_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_reports_each_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "v.csv");
    let o = qfi_lab(&["verify", "bounds", "--d", "2,3", "--cases", "30", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let checks = stdout.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count();
    assert!(checks >= 8);
    assert!(stdout.contains("identities checked, 0 failed"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), checks + 2);
}

#[test]
fn ghz_relation_in_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "g.csv");
    assert_eq!(code(&qfi_lab(&["ghz", "--n", "5", "--p-grid", "0,0.25,1", "--out", &out])), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "p,purity,qfi,qfi_per_n2,rhs,fidelity_bound");
    for row in text.lines().skip(2) {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[3] - f[4]).abs() < 1e-12 && (f[2] - 25.0 * f[3]).abs() < 1e-10);
        assert!(f[5] <= f[2] + 1e-9);
    }
}
