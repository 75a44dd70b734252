use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ergocap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergocap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(p).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const MAD: &str = r#"{"kind": "mad", "gamma1": 0.3, "gamma2": 0.2, "gamma3": 0.6}"#;

#[test]
fn sweep_mad_writes_grid_rows_and_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "mad.json",
        &format!(r#"{{"channel": {MAD}, "grid_size": 8, "optimizer": {{"n_starts": 4}}}}"#),
    );
    let out = dir.path().join("mad.csv");
    let o = ergocap(&["sweep", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["e", "e1", "e1_tot", "chi", "chi_tot", "gap"]);
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r[5] >= -1e-9));
    assert_eq!(rows[8][0], 2.0);

    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("mad.csv.report.json")).unwrap(),
    )
    .unwrap();
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 9);
    assert!(points[3]["e1"]["best_start"].is_u64());
    assert!(
        points[3]["e1_tot"]["feasibility_residual"]
            .as_f64()
            .unwrap()
            <= 1e-9
    );
    assert_eq!(report["config"]["grid_size"], 8);
}

#[test]
fn identity_sweep_recovers_all_energy() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "id.json",
        r#"{"channel": {"kind": "identity", "dim": 3}, "grid_size": 4,
            "optimizer": {"n_starts": 2}, "outputs": ["chi", "e1"]}"#,
    );
    let out = dir.path().join("id.csv");
    let o = ergocap(&[
        "sweep",
        "--config",
        s(&cfg),
        "--out",
        s(&out),
        "--jobs",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["e", "e1", "chi"]);
    for r in rows {
        assert!((r[2] - r[0]).abs() < 1e-6);
    }
}

#[test]
fn overrides_and_unit_scale() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "id.json",
        r#"{"channel": {"kind": "identity", "dim": 2}, "hamiltonian": [0, 1],
            "grid_size": 64, "optimizer": {"n_starts": 2}, "outputs": ["e1"]}"#,
    );
    let out = dir.path().join("id.csv");
    let o = ergocap(&[
        "sweep",
        "--config",
        s(&cfg),
        "--out",
        s(&out),
        "--grid",
        "2",
        "--seed",
        "9",
        "--unit-scale",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&out);
    assert_eq!(rows.len(), 3);
    assert!((rows[2][0] - 3.0).abs() < 1e-12);
    assert!((rows[2][1] - 3.0).abs() < 1e-6);
    let report = std::fs::read_to_string(dir.path().join("id.csv.report.json")).unwrap();
    assert!(report.contains("\"seed\": 9"));
}

#[test]
fn invalid_damping_exits_2_naming_constraint() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.json",
        r#"{"channel": {"kind": "mad", "gamma1": 0.3, "gamma2": 0.6, "gamma3": 0.6}}"#,
    );
    let o = ergocap(&[
        "sweep",
        "--config",
        s(&cfg),
        "--out",
        s(&dir.path().join("x.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("gamma2 + gamma3"), "{err}");
    assert!(err.contains("channel"), "{err}");
}

#[test]
fn malformed_config_reports_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.json",
        "{\n  \"channel\": {\"kind\": \"mad\", \"gamma1\": 0.3,\n  \"gama2\": 0.2}\n}",
    );
    let o = ergocap(&[
        "sweep",
        "--config",
        s(&cfg),
        "--out",
        s(&dir.path().join("x.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("bad.json:") && err.contains("`gama2`"),
        "{err}"
    );
    let o = ergocap(&[
        "sweep",
        "--config",
        s(&write(&dir, "b2.json", "{\n  \"grid_size\": 8,\n}")),
        "--out",
        "x.csv",
    ]);
    assert!(stderr(&o).contains("b2.json:3:"), "{}", stderr(&o));
}

#[test]
fn hamiltonian_validation() {
    let dir = TempDir::new().unwrap();
    for (h, needle) in [
        ("[1, 2, 3]", "smallest"),
        ("[0, -1, 2]", "non-negative"),
        ("[0, 1]", "dimension"),
    ] {
        let cfg = write(
            &dir,
            "h.json",
            &format!(r#"{{"channel": {MAD}, "hamiltonian": {h}}}"#),
        );
        let o = ergocap(&[
            "sweep",
            "--config",
            s(&cfg),
            "--out",
            s(&dir.path().join("x.csv")),
        ]);
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains(needle), "{}", stderr(&o));
    }
}

#[test]
fn bosonic_gap_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("b.csv");
    let o = ergocap(&[
        "bosonic-gap",
        "--beta-min",
        "0.5",
        "--beta-max",
        "4",
        "--steps",
        "8",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["beta", "beta_star", "e_pass", "e_cpass", "gap"]);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[4] >= 0.0 && r[1] > r[0]));
    assert!(rows[7][4] < rows[0][4]);
    // regression fixtures
    assert!((rows[0][4] - 6.395_869_942_436_96e-2).abs() < 1e-12);
    assert!((rows[7][4] - 2.363_531_624_673_815e-3).abs() < 1e-12);
}

#[test]
fn bosonic_gap_vanishes_at_low_temperature() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("b.csv");
    let o = ergocap(&[
        "bosonic-gap",
        "--beta-min",
        "19",
        "--beta-max",
        "20",
        "--steps",
        "2",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let (_, rows) = read_csv(&out);
    assert!(rows[1][4] < 1e-6);
}

#[test]
fn bosonic_gap_rejects_bad_range() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("b.csv");
    for args in [["1", "1", "3"], ["-1", "2", "3"], ["1", "2", "1"]] {
        let o = ergocap(&[
            "bosonic-gap",
            "--beta-min",
            args[0],
            "--beta-max",
            args[1],
            "--steps",
            args[2],
            "--out",
            s(&out),
        ]);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

fn summary(dir: &TempDir, state: &str) -> Vec<(String, String)> {
    let p = write(dir, "state.json", state);
    let o = ergocap(&["ergotropy", "--state", s(&p), "--hamiltonian", "0,1,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(" = ").unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn value(kv: &[(String, String)], key: &str) -> f64 {
    kv.iter()
        .find(|(k, _)| k == key)
        .unwrap()
        .1
        .parse()
        .unwrap()
}

#[test]
fn ergotropy_summaries() {
    let dir = TempDir::new().unwrap();
    let ground = summary(&dir, r#"{"diagonal": [1, 0, 0]}"#);
    assert_eq!(value(&ground, "ergotropy"), 0.0);
    assert_eq!(value(&ground, "total_ergotropy"), 0.0);

    let top = summary(
        &dir,
        r#"{"entries": [[[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0]], [[0,0],[0,0],[1,0]]]}"#,
    );
    assert!((value(&top, "ergotropy") - 2.0).abs() < 1e-12);
    assert!((value(&top, "total_ergotropy") - 2.0).abs() < 1e-12);
    assert_eq!(value(&top, "entropy"), 0.0);

    let mixed = summary(&dir, r#"{"diagonal": [0.1, 0.2, 0.7]}"#);
    assert!((value(&mixed, "ergotropy") - 1.2).abs() < 1e-12);
    assert!((value(&mixed, "mean_energy") - 1.6).abs() < 1e-12);
    let keys: Vec<&str> = mixed.iter().map(|(k, _)| k.as_str()).collect();
    assert_eq!(
        keys,
        [
            "mean_energy",
            "ergotropy",
            "total_ergotropy",
            "beta_star",
            "entropy"
        ]
    );
}

#[test]
fn malformed_states_exit_2() {
    let dir = TempDir::new().unwrap();
    for state in [
        r#"{"diagonal": [0.5, 0.6, -0.1]}"#,
        r#"{"diagonal": [0.5, 0.6, 0.1]}"#,
        r#"{"entries": [[[1,0],[0,0]]]}"#,
        r#"{"diagonal": [1, 0, 0], "entries": []}"#,
        "not json",
    ] {
        let p = write(&dir, "state.json", state);
        let o = ergocap(&["ergotropy", "--state", s(&p)]);
        assert_eq!(o.status.code(), Some(2), "{state}");
    }
    let p = write(&dir, "state.json", r#"{"diagonal": [1, 0]}"#);
    let o = ergocap(&["ergotropy", "--state", s(&p), "--hamiltonian", "0,1,2"]);
    assert_eq!(o.status.code(), Some(2));
}
