use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config(name: &str) -> PathBuf {
    root().join("scenarios").join(format!("{name}.toml"))
}

fn evgrid(args: &[&std::ffi::OsStr]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evgrid")).args(args).output().unwrap()
}

macro_rules! args {
    ($($a:expr),* $(,)?) => { &[$(std::ffi::OsStr::new($a)),*] };
}

#[test]
fn run_writes_all_formats() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config("target_50_shortcut");
    let o = evgrid(args!["run", "--config", &cfg, "--out", out.path(), "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.path().join("target_50_shortcut.csv")).unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), csv);
    assert!(out.path().join("target_50_shortcut.json").exists());
    assert!(out.path().join("target_50_shortcut.txt").exists());
}

#[test]
fn hourly_dump_has_one_row_per_hour() {
    let out = tempfile::tempdir().unwrap();
    let hourly = out.path().join("hourly.csv");
    let cfg = config("target_50_shortcut");
    let o = evgrid(args![
        "run",
        "--config",
        &cfg,
        "--out",
        out.path(),
        "--emit-hourly",
        &hourly
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(hourly).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "timestamp_iso8601,baseline_mw,unmanaged_2030_mw,managed_2030_mw,unmanaged_2050_mw,managed_2050_mw"
    );
    assert_eq!(lines.count(), 8760);
}

#[test]
fn compare_prints_every_scenario() {
    let (a, b) = (config("bau_low_current_policy"), config("bau_high_current_policy"));
    let o = evgrid(args!["compare", "--configs", &a, &b, "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["scenario"], "bau_low_current_policy");
    assert_eq!(v[1]["scenario"], "bau_high_current_policy");
}

#[test]
fn calibrate_reports_plif() {
    let cfg = config("market_share_50_simulated");
    let o = evgrid(args![
        "calibrate-plif",
        "--config",
        &cfg,
        "--ev-pct-range",
        "2:10:2",
        "--format",
        "json"
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["unmanaged"]["samples"].as_array().unwrap().len(), 5);
    assert!((v["unmanaged"]["plif"].as_f64().unwrap() - 0.41).abs() < 0.02);
}

#[test]
fn synth_data_reproduces_shipped_files() {
    let out = tempfile::tempdir().unwrap();
    let o = evgrid(args!["synth-data", "--out", out.path()]);
    assert!(o.status.success());
    for name in ["load.csv", "travel.csv", "profile_unmanaged.csv", "profile_managed.csv"] {
        let shipped = std::fs::read(root().join("data/sample").join(name)).unwrap();
        assert!(shipped == std::fs::read(out.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();
    // I/O: missing config, missing dataset
    let o = evgrid(args!["run", "--config", "no/such.toml", "--out", out.path()]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = config("current_policy_low_shortcut");
    let o = evgrid(args![
        "run",
        "--config",
        &cfg,
        "--data-dir",
        out.path(),
        "--out",
        out.path()
    ]);
    assert_eq!(o.status.code(), Some(2));

    // validation: bad config contents, bad range, usage errors
    let bad = out.path().join("bad.toml");
    let text = std::fs::read_to_string(config("current_policy_low_shortcut"))
        .unwrap()
        .replace("end_year = 2050", "end_year = 2020");
    std::fs::write(&bad, text).unwrap();
    let o = evgrid(args!["run", "--config", &bad, "--out", out.path()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("current_policy_low_shortcut"));
    let o = evgrid(args!["calibrate-plif", "--config", &cfg, "--ev-pct-range", "1:x:1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = evgrid(args!["compare", "--configs", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let o = evgrid(args!["run", "--config", &cfg, "--out", out.path(), "--format", "xml"]);
    assert_eq!(o.status.code(), Some(1));
}
