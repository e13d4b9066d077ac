use std::fs;
use std::path::{Path, PathBuf};

use evgrid_core::sample::{self, SampleSpec};
use evgrid_core::scenario::{load_datasets, DatasetPaths};
use evgrid_core::Error;

fn shipped_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample")
}

/// Copies the shipped dataset into a scratch dir so single files can be broken.
fn scratch_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(shipped_dir()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    dir
}

fn edit(path: &Path, f: impl FnOnce(String) -> String) {
    let text = fs::read_to_string(path).unwrap();
    fs::write(path, f(text)).unwrap();
}

fn load(dir: &Path) -> Result<evgrid_core::scenario::DatasetBundle, Error> {
    load_datasets(&DatasetPaths::in_dir(dir))
}

#[test]
fn shipped_files_match_generator() {
    let fresh = tempfile::tempdir().unwrap();
    sample::generate(&SampleSpec::default())
        .unwrap()
        .write_to(fresh.path())
        .unwrap();
    for name in [
        "load.csv",
        "travel.csv",
        "profile_unmanaged.csv",
        "profile_managed.csv",
        "incentive_coefficients.csv",
        "conversion.csv",
    ] {
        let shipped = fs::read(shipped_dir().join(name)).unwrap();
        let regenerated = fs::read(fresh.path().join(name)).unwrap();
        assert!(shipped == regenerated, "{name} differs from `evgrid synth-data` output");
    }
}

#[test]
fn shipped_dataset_loads() {
    let data = load(&shipped_dir()).unwrap();
    assert_eq!(data.sample_year(), 2019);
    assert_eq!(data.baseline_load.len(), 8760);
    assert_eq!(data.travel.len(), 365);
}

#[test]
fn missing_file_is_io() {
    let dir = scratch_copy();
    fs::remove_file(dir.path().join("travel.csv")).unwrap();
    let err = load(dir.path()).unwrap_err();
    assert!(err.is_io(), "{err}");
}

#[test]
fn load_gap_names_missing_hour() {
    let dir = scratch_copy();
    edit(&dir.path().join("load.csv"), |t| {
        t.lines()
            .filter(|l| !l.starts_with("2019-03-10T02:00:00"))
            .map(|l| format!("{l}\n"))
            .collect()
    });
    match load(dir.path()).unwrap_err() {
        Error::LoadGap { expected, .. } => assert_eq!(expected.to_string(), "2019-03-10 02:00:00"),
        other => panic!("{other}"),
    }
}

#[test]
fn malformed_row_reports_line() {
    let dir = scratch_copy();
    edit(&dir.path().join("load.csv"), |t| {
        t.replacen("2019-01-01T01:00:00,", "2019-01-01T01:00:00,abc", 1)
    });
    match load(dir.path()).unwrap_err() {
        Error::MalformedRow { line, .. } => assert_eq!(line, 3),
        other => panic!("{other}"),
    }
}

#[test]
fn missing_travel_day() {
    let dir = scratch_copy();
    edit(&dir.path().join("travel.csv"), |t| {
        t.lines()
            .filter(|l| !l.starts_with("2019-07-04"))
            .map(|l| format!("{l}\n"))
            .collect()
    });
    match load(dir.path()).unwrap_err() {
        Error::MissingDay(d) => assert_eq!(d.to_string(), "2019-07-04"),
        other => panic!("{other}"),
    }
}

#[test]
fn missing_travel_bin() {
    let dir = scratch_copy();
    edit(&dir.path().join("travel.csv"), |t| {
        t.lines()
            .filter(|l| !l.starts_with("2019-02-02,gt500mi"))
            .map(|l| format!("{l}\n"))
            .collect()
    });
    assert!(matches!(
        load(dir.path()).unwrap_err(),
        Error::MissingBin { bin: "gt500mi", .. }
    ));
}

#[test]
fn unnormalized_profile_rejected() {
    let dir = scratch_copy();
    edit(&dir.path().join("profile_unmanaged.csv"), |t| {
        let mut lines: Vec<String> = t.lines().map(str::to_owned).collect();
        lines[1] = "0,0.5".into();
        lines.join("\n") + "\n"
    });
    assert!(matches!(
        load(dir.path()).unwrap_err(),
        Error::ProfileNotNormalized { .. }
    ));
}

#[test]
fn wrong_header_rejected() {
    let dir = scratch_copy();
    edit(&dir.path().join("profile_managed.csv"), |t| {
        t.replacen("hour,fraction", "hr,share", 1)
    });
    assert!(matches!(
        load(dir.path()).unwrap_err(),
        Error::MalformedRow { line: 1, .. }
    ));
}
