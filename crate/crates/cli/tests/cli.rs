use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wavecaustics"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wavecaustics-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    bin().arg("--config").arg(&cfg).arg("--out").arg(dir).args(args).env_remove("WAVECAUSTICS_OUT").output().unwrap()
}

/// Data rows of a CSV artifact: header comment and column row stripped.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# module="));
    lines.skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn first_airy_zero() {
    let dir = scratch("zeros");
    let out = run(&dir, "[zeros]\nk_max = 1\n", &["zeros"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.join("zeros_zeros.csv"));
    assert_eq!(r.len(), 1);
    let w: f64 = r[0][1].parse().unwrap();
    assert!((w - 2.338107410459767).abs() < 1e-12);
}

#[test]
fn malformed_config_exits_with_2() {
    let dir = scratch("bad");
    for text in ["h = -1.0\n", "nonsense = 1\n", "[zeros\n"] {
        let out = run(&dir, text, &["zeros"]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
    }
}

#[test]
fn flags_override_the_file() {
    let dir = scratch("flags");
    let out = run(&dir, "h = 0.03125\n", &["zeros", "--h", "0.0078125", "--a", "0.05"]);
    assert!(out.status.success());
    let echo = fs::read_to_string(dir.join("zeros_config.toml")).unwrap();
    assert!(echo.contains("h = 0.0078125") && echo.contains("a = 0.05"), "{echo}");
}

#[test]
fn propagate_has_zero_trace_and_echoes_params() {
    let dir = scratch("propagate");
    let cfg = "h = 0.03125\na = 0.1\n[propagate]\nt = { start = 0.0, end = 0.1, count = 2 }\n\
               x = { start = 0.0, end = 0.2, count = 5 }\ny = { start = -0.02, end = 0.02, count = 3 }\n";
    let out = run(&dir, cfg, &["propagate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.join("propagate_field.csv"));
    assert_eq!(r.len(), 2 * 5 * 3);
    for row in r.iter().filter(|row| row[1].parse::<f64>().unwrap() == 0.0) {
        assert_eq!(row[5].parse::<f64>().unwrap(), 0.0);
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("propagate_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["data"]["params"]["h"].as_f64(), Some(0.03125));
    assert_eq!(manifest["data"]["params"]["a"].as_f64(), Some(0.1));
}

#[test]
fn one_swallowtail_for_the_first_reflection() {
    let dir = scratch("caustics");
    let out = run(&dir, "", &["caustics"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("caustics_events.json")).unwrap()).unwrap();
    let events = log["data"].as_array().unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0]["kind"], "Swallowtail");

    let out = run(&dir, "[caustics]\nn = 0\n", &["caustics"]);
    assert!(out.status.success());
    let log: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("caustics_events.json")).unwrap()).unwrap();
    assert!(log["data"].as_array().unwrap().is_empty());
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let (d1, d2) = (scratch("det1"), scratch("det2"));
    let cfg = "h = 0.03125\n[propagate]\nt = { start = 0.05, end = 0.1, count = 2 }\n\
               x = { start = 0.05, end = 0.15, count = 3 }\ny = { start = -0.02, end = 0.02, count = 3 }\n";
    assert!(run(&d1, cfg, &["propagate", "--threads", "1"]).status.success());
    assert!(run(&d2, cfg, &["propagate", "--threads", "3"]).status.success());
    let a = fs::read(d1.join("propagate_field.csv")).unwrap();
    let b = fs::read(d2.join("propagate_field.csv")).unwrap();
    // The thread count is part of the config, so only the data rows must agree.
    let strip = |v: &[u8]| String::from_utf8_lossy(v).lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn parametrix_sweep_outside_its_regime_fails() {
    let dir = scratch("regime");
    let out = run(&dir, "a = 0.02\n[decay]\nevaluator = \"Parametrix\"\n", &["decay"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decay_defaults() {
    let dir = scratch("decay");
    let out = run(&dir, "", &["decay"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("decay_report.json")).unwrap()).unwrap();
    assert_eq!(rep["data"]["regime"], "Gallery");
    assert!(rep["data"]["fit"][0]["residual"].as_f64().unwrap() < 0.2);

    let out = run(&dir, "a = 0.04\n", &["decay"]);
    assert!(out.status.success());
    assert!(rows(&dir.join("decay_peaks.csv")).len() >= 1);
}
