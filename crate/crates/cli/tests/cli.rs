//! End-to-end tests of the `repairsim` binary: schema freezing,
//! determinism at the artifact boundary, and error reporting.

use std::path::Path;
use std::process::{Command, Output};

const SWEEP_HEADER: &str =
    "ebn0_db,theta_rad,trials,ps,ps_stderr,psub,psub_stderr,lower_bound,upper_bound,r_times_ps";

fn repairsim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repairsim"))
        .args(args)
        .current_dir(dir)
        .env_remove("REPAIRSIM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).expect("output file exists")
}

#[test]
fn sweep_csv_schema_and_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = repairsim(
        dir.path(),
        &[
            "sweep", "--q", "4", "--r", "2", "--channel", "awgn", "--ebn0", "0:8:2", "--trials",
            "500", "--seed", "7", "--out", "run.csv",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "run.csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 1 + 5); // header + 0,2,4,6,8 dB
    assert!(!text.contains('\r'));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 10);
    }
}

#[test]
fn noiseless_sweep_row_is_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = repairsim(
        dir.path(),
        &[
            "sweep", "--q", "4", "--r", "2", "--channel", "awgn", "--ebn0", "300:300:1",
            "--trials", "200", "--seed", "7", "--out", "zero.csv",
        ],
    );
    assert!(out.status.success());
    let text = read(dir.path(), "zero.csv");
    let row = text.lines().nth(1).unwrap();
    // zero errors: rates and bounds are exactly zero; the stderr
    // columns carry the rule-of-three bounds 3/400 and 3/200.
    assert_eq!(
        row,
        "3.00000000e2,0.00000000e0,200,0.00000000e0,7.50000000e-3,\
         0.00000000e0,1.50000000e-2,0.00000000e0,0.00000000e0,0.00000000e0"
    );
}

#[test]
fn identical_configurations_produce_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep", "--q", "4", "--r", "3", "--channel", "rayleigh", "--ebn0", "0:6:3", "--trials",
        "1000", "--seed", "11",
    ];
    let mut first = args.to_vec();
    first.extend(["--out", "a.json", "--format", "json"]);
    let mut second = args.to_vec();
    second.extend(["--out", "b.json", "--format", "json"]);
    assert!(repairsim(dir.path(), &first).status.success());
    assert!(repairsim(dir.path(), &second).status.success());
    assert_eq!(read(dir.path(), "a.json"), read(dir.path(), "b.json"));
}

#[test]
fn sweep_json_mirrors_the_csv_fields_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "sweep", "--q", "16", "--r", "2", "--channel", "awgn", "--ebn0", "4:8:4", "--trials",
        "400", "--seed", "5",
    ];
    let mut csv_args = base.to_vec();
    csv_args.extend(["--out", "run.csv"]);
    let mut json_args = base.to_vec();
    json_args.extend(["--out", "run.json"]);
    assert!(repairsim(dir.path(), &csv_args).status.success());
    assert!(repairsim(dir.path(), &json_args).status.success());

    let json_text = read(dir.path(), "run.json");
    let parsed: serde_json::Value = serde_json::from_str(&json_text).unwrap();
    assert_eq!(parsed["artifact_version"], "0.1.0");
    assert_eq!(parsed["q"], 16);
    assert_eq!(parsed["r"], 2);
    assert_eq!(parsed["channel"], "awgn");
    assert_eq!(parsed["seed"], 5);
    assert_eq!(parsed["trials"], 400);
    let points = parsed["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);

    // every JSON number reproduces the CSV value exactly
    let csv_text = read(dir.path(), "run.csv");
    for (row, point) in csv_text.lines().skip(1).zip(points) {
        let cols: Vec<&str> = row.split(',').collect();
        let keys = [
            "ebn0_db",
            "theta_rad",
            "trials",
            "ps",
            "ps_stderr",
            "psub",
            "psub_stderr",
            "lower_bound",
            "upper_bound",
            "r_times_ps",
        ];
        for (col, key) in cols.iter().zip(keys) {
            let csv_value: f64 = col.parse().unwrap();
            let json_value = point[key].as_f64().unwrap();
            assert_eq!(csv_value, json_value, "{key}");
        }
    }

    // re-read then re-emit: the parsed document is stable
    let reparsed: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, reparsed);
}

#[test]
fn unsupported_q_is_a_named_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = repairsim(
        dir.path(),
        &[
            "sweep", "--q", "5", "--r", "2", "--channel", "awgn", "--ebn0", "0:4:2", "--out",
            "x.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("q=5"), "stderr: {stderr}");
    assert!(stderr.contains("4, 16, 64"), "stderr: {stderr}");
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn missing_and_invalid_fields_are_named() {
    let dir = tempfile::tempdir().unwrap();
    for (args, needle) in [
        (vec!["sweep", "--r", "2", "--channel", "awgn", "--ebn0", "0:4:2"], "--q"),
        (
            vec!["sweep", "--q", "4", "--r", "2", "--channel", "maser", "--ebn0", "0:4:2"],
            "channel",
        ),
        (
            vec!["sweep", "--q", "4", "--r", "2", "--channel", "awgn", "--ebn0", "0:4"],
            "ebn0",
        ),
        (
            vec![
                "sweep", "--q", "4", "--r", "2", "--channel", "awgn", "--ebn0", "0:4:2",
                "--theta-mode", "fixed",
            ],
            "theta",
        ),
        (
            vec!["optimize-rotation", "--q", "4", "--ebn0-db", "20", "--objective", "f9"],
            "objective",
        ),
    ] {
        let out = repairsim(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(needle), "{args:?} -> {stderr}");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.toml"),
        "q = 4\nr = 2\nchannel = \"awgn\"\nebn0 = \"0:4:4\"\ntrials = 300\nseed = 9\n",
    )
    .unwrap();
    let out = repairsim(
        dir.path(),
        &["sweep", "--config", "cfg.toml", "--out", "a.csv"],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("300 trials/point"));

    let out = repairsim(
        dir.path(),
        &["sweep", "--config", "cfg.toml", "--trials", "500", "--out", "b.csv"],
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("500 trials/point"));

    // unknown keys are rejected with the file named
    std::fs::write(dir.path().join("bad.toml"), "qq = 4\n").unwrap();
    let out = repairsim(dir.path(), &["sweep", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml"));
}

#[test]
fn out_dir_env_var_redirects_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("results");
    std::fs::create_dir(&outdir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_repairsim"))
        .args([
            "sweep", "--q", "4", "--r", "1", "--channel", "awgn", "--ebn0", "4:4:1", "--trials",
            "100", "--out", "env.csv",
        ])
        .current_dir(dir.path())
        .env("REPAIRSIM_OUT_DIR", &outdir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(outdir.join("env.csv").exists());
    assert!(!dir.path().join("env.csv").exists());
}

#[test]
fn optimize_rotation_emits_the_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = repairsim(
        dir.path(),
        &[
            "optimize-rotation", "--q", "4", "--r", "2", "--ebn0-db", "20", "--objective", "f2",
            "--grid", "128", "--out", "rot.json",
        ],
    );
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "rot.json")).unwrap();
    assert_eq!(parsed["objective"], "f2");
    assert_eq!(parsed["grid"], 128);
    assert_eq!(parsed["es_over_4n0"], 50.0);
    assert_eq!(parsed["profile"].as_array().unwrap().len(), 128);
    let theta = parsed["theta_star"].as_f64().unwrap();
    assert!(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2);

    let out = repairsim(
        dir.path(),
        &[
            "optimize-rotation", "--q", "4", "--ebn0-db", "20", "--objective", "f2", "--grid",
            "64", "--out", "rot.csv",
        ],
    );
    assert!(out.status.success());
    let text = read(dir.path(), "rot.csv");
    assert_eq!(text.lines().next().unwrap(), "theta_rad,objective");
    assert_eq!(text.lines().count(), 65);
}

#[test]
fn oracle_check_reports_the_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = repairsim(
        dir.path(),
        &[
            "oracle-check", "--q", "4", "--r", "2", "--ps", "0.1", "--trials", "50000", "--seed",
            "3", "--out", "oracle.json",
        ],
    );
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "oracle.json")).unwrap();
    assert_eq!(parsed["exact"], 0.186666667);
    assert_eq!(parsed["pass"], true);

    let out = repairsim(
        dir.path(),
        &[
            "oracle-check", "--q", "4", "--r", "2", "--ps", "0.1", "--trials", "1000", "--out",
            "oracle.csv",
        ],
    );
    assert!(out.status.success());
    let text = read(dir.path(), "oracle.csv");
    assert_eq!(
        text.lines().next().unwrap(),
        "q,r,ps,trials,empirical,exact,stderr,sigmas,pass"
    );
}
