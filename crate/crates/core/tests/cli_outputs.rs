use std::fs;
use std::path::Path;
use std::process::Command;

use sinai_ppp::harness::{self, ExperimentConfig, ExperimentId};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sinai-ppp"))
}

fn small_config(out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        eps_schedule: vec![0.02, 0.01],
        n_trajectories: 8,
        t_max: 800.0,
        n_trials: 200,
        min_events: 100,
        oracle_samples: 2000,
        record_replicas: 2000,
        output_dir: out.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn csv_and_json_schemas() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let (out, files) = harness::run(&cfg, ExperimentId::E1).unwrap();
    let dir = tmp.path().join("e1");
    assert!(files.contains(&dir.join("entries.csv")));
    assert_eq!(header(&dir.join("entries.csv")), "eps,traj_id,t,j,p_angle,u_angle,duration,closest");
    assert_eq!(header(&dir.join("counts.csv")), "eps,window,label,count");

    let mut rdr = csv::Reader::from_path(dir.join("entries.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), out.entries.len());
    // full precision: every float parses back to the value held in memory
    for (rec, row) in rows.iter().zip(&out.entries).take(500) {
        assert_eq!(rec[2].parse::<f64>().unwrap(), row.t);
        assert_eq!(rec[4].parse::<f64>().unwrap(), row.p_angle);
        assert_eq!(rec[7].parse::<f64>().unwrap(), row.closest);
    }

    let reports: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("reports.json")).unwrap()).unwrap();
    let arr = reports.as_array().unwrap();
    assert_eq!(arr.len(), out.reports.len());
    for r in arr {
        for key in ["test_name", "statistic", "p_value", "n", "passed", "alpha"] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"].as_bool().unwrap(), out.passed());
}

#[test]
fn records_csv_has_one_row_per_replica() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    harness::run(&cfg, ExperimentId::E7).unwrap();
    let path = tmp.path().join("e7/records.csv");
    assert_eq!(header(&path), "replica,n_points,n_records,records_by_count_time");
    assert_eq!(fs::read_to_string(path).unwrap().lines().count(), 1 + cfg.record_replicas);
}

#[test]
fn cli_validate_prints_diagnostics() {
    let out = bin().arg("validate").output().unwrap();
    assert!(out.status.success());
    let d: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["ok"], true);
    assert_eq!(d["targets"].as_array().unwrap().len(), 2);
}

#[test]
fn cli_rejects_bad_schedule() {
    let out = bin().args(["validate", "--eps", "0.01,0.02"]).output().unwrap();
    assert!(!out.status.success());
    let d: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["ok"], false);
    let out = bin().args(["e2", "--eps", "0.01,0.02"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("config.json");
    let cfg = ExperimentConfig {
        output_dir: tmp.path().join("ignored"),
        ..small_config(tmp.path())
    };
    fs::write(&cfg_path, cfg.to_json()).unwrap();
    let out_dir = tmp.path().join("runs");
    let run = |seed: &str, workers: &str, out: &Path| {
        bin()
            .args(["e7", "--config"])
            .arg(&cfg_path)
            .args(["--seed", seed, "--workers", workers, "--out"])
            .arg(out)
            .output()
            .unwrap()
    };
    let a = run("5", "1", &out_dir.join("a"));
    let b = run("5", "2", &out_dir.join("b"));
    let c = run("6", "1", &out_dir.join("c"));
    for o in [&a, &b, &c] {
        let code = o.status.code().unwrap();
        assert!(code == 0 || code == 1, "{}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8_lossy(&o.stdout);
        let passed = stdout.lines().all(|l| !l.starts_with("FAIL") && !l.starts_with("ERROR"));
        assert_eq!(code == 0, passed);
    }
    assert!(!tmp.path().join("ignored").exists());
    let read = |d: &str| fs::read(out_dir.join(d).join("e7/records.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn config_file_errors_are_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("bad.json");
    fs::write(&p, r#"{"n_trajectories": "many"}"#).unwrap();
    let out = bin().args(["e1", "--config"]).arg(&p).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}
