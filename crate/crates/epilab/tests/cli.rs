//! Binary-level tests of the experiment runner: exit codes, artifact
//! formats, determinism and the distribution round-trip invariant.

use std::path::Path;
use std::process::Command;

use epilab::config::{self, ExperimentConfig, CSV_HEADER};
use epilab::dist::Dist;

fn run_bin(args: &[&str], extra: &[&Path]) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_epilab"));
    let mut extra = extra.iter();
    for a in args {
        if *a == "{}" {
            cmd.arg(extra.next().unwrap());
        } else {
            cmd.arg(a);
        }
    }
    cmd.output().unwrap()
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

#[test]
fn malformed_config_exits_three_with_position_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"schema_version\": nope\n}").unwrap();
    let out = run_bin(&["verify", "--config", "{}"], &[&p]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_config_file_exits_three() {
    let out = run_bin(
        &["verify", "--config", "{}"],
        &[Path::new("/nonexistent/nowhere.json")],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn empty_experiment_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        schema_version: config::SCHEMA_VERSION,
        experiments: vec![],
        output: None,
    };
    let p = write_json(dir.path(), "empty.json", &cfg);
    let out = run_bin(&["verify", "--config", "{}"], &[&p]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("total 0"), "{err}");
}

#[test]
fn csv_artifact_has_mandatory_header_and_row_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config::negative_control_config();
    let cfg_path = write_json(dir.path(), "neg.json", &cfg);
    let out_path = dir.path().join("reports.csv");
    let out = run_bin(
        &["verify", "--config", "{}", "--out", "{}"],
        &[&cfg_path, &out_path],
    );
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].contains("violated"));
}

#[test]
fn json_artifacts_are_deterministic_modulo_timing_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config::negative_control_config();
    let cfg_path = write_json(dir.path(), "neg.json", &cfg);
    let strip = |p: &Path| -> String {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("timestamp_unix_ms") && !l.contains("wall_time"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    run_bin(
        &["verify", "--config", "{}", "--out", "{}"],
        &[&cfg_path, &out_a],
    );
    run_bin(
        &["verify", "--config", "{}", "--out", "{}"],
        &[&cfg_path, &out_b],
    );
    assert_eq!(strip(&out_a), strip(&out_b));
}

#[test]
fn eval_reports_closed_form_gaussian_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "g.json", &Dist::gaussian1(0.0, 1.0));
    let out = run_bin(&["eval", "--config", "{}"], &[&p]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("eval must print JSON");
    let h = doc["entropy_nats"].as_f64().unwrap();
    assert!((h - 1.4189385332046727).abs() < 1e-9, "{h}");
    assert!((doc["entropy_power"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn lv_subcommand_emits_trace_only_when_verbose() {
    let dir = tempfile::tempdir().unwrap();
    let spec = serde_json::json!({
        "cap": [[1.0,0.2],[0.2,0.8]], "cov_z": [[1.0,0.0],[0.0,1.0]], "mu": 1.5
    });
    let p = write_json(dir.path(), "lv.json", &spec);
    let quiet = run_bin(&["lv", "--config", "{}"], &[&p]);
    assert_eq!(quiet.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&quiet.stdout).unwrap();
    assert_eq!(doc["trace"].as_array().unwrap().len(), 0);
    let verbose = run_bin(&["lv", "--verbose", "--config", "{}"], &[&p]);
    let doc: serde_json::Value = serde_json::from_slice(&verbose.stdout).unwrap();
    assert!(!doc["trace"].as_array().unwrap().is_empty());
}

#[test]
fn fig3_writes_both_channels_with_26_points_each() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("fig3.csv");
    let out = run_bin(&["fig3", "--out", "{}"], &[&out_path]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "channel,t,mutual_info_nats,fitted_slope"
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 52);
    assert_eq!(rows.iter().filter(|r| r[0] == "gaussian").count(), 26);
    assert_eq!(rows.iter().filter(|r| r[0] == "laplacian").count(), 26);
    // I = 0 at t = 0; mutual information increases with SNR.
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.0);
    let infos: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "gaussian")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert!(infos.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn tol_scale_flag_widens_equality_band() {
    // With an enormous tolerance scale every strict inequality in the
    // negative control collapses into the equality band: exit 0.
    let dir = tempfile::tempdir().unwrap();
    let cfg = config::negative_control_config();
    let cfg_path = write_json(dir.path(), "neg.json", &cfg);
    let out = run_bin(
        &["verify", "--tol-scale", "1e9", "--config", "{}"],
        &[&cfg_path],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn dist_specs_round_trip_density_equal() {
    let cases = vec![
        Dist::gaussian1(0.7, 2.3),
        Dist::laplace(-0.4, 0.9),
        Dist::uniform(-1.0, 2.0),
        Dist::Mixture {
            weights: vec![0.3, 0.7],
            components: vec![Dist::gaussian1(-1.0, 1.0), Dist::gaussian1(2.0, 0.5)],
        },
        Dist::Gaussian {
            mean: vec![0.0, 1.0],
            cov: vec![vec![2.0, 0.3], vec![0.3, 1.0]],
        },
    ];
    for d in cases {
        let text = serde_json::to_string(&d).unwrap();
        let back: Dist = serde_json::from_str(&text).unwrap();
        let view_a = d.view().unwrap();
        let view_b = back.view().unwrap();
        for k in 0..10 {
            let t = -2.0 + 4.0 * k as f64 / 9.0;
            let point: Vec<f64> = view_a.mean.iter().map(|m| m + t).collect();
            let la = (view_a.log_pdf)(&point);
            let lb = (view_b.log_pdf)(&point);
            assert!(
                (la - lb).abs() <= 1e-12 || (la == f64::NEG_INFINITY && lb == f64::NEG_INFINITY),
                "{text} differs at {point:?}: {la} vs {lb}"
            );
        }
    }
}
