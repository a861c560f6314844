//! End-to-end runs of the `sphere-ls` binary.

use std::path::Path;
use std::process::{Command, Output};

use sphere_ls_lab::runner::read_csv;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphere-ls")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const FULL_SPHERE: &str = r#"
name = "full"
d = 2
degrees = [2, 4]

[family]
kind = "fixed"

[family.set]
kind = "full"

[functionals.eigen]
route = "gram"

[functionals.density]
r = 2.0
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn run_into(config: &str, out: &Path, workers: &str) -> String {
    let o = bin(&["run", "--config", config, "--out", out.to_str().unwrap(), "--workers", workers]);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o).trim().to_owned()
}

#[test]
fn full_sphere_run_gives_unit_lambda_and_density() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "full.toml", FULL_SPHERE);
    let csv = run_into(&config, &dir.path().join("out"), "1");
    let rows = read_csv(Path::new(&csv)).unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!((r.value - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.wall_time.is_none());
    }
}

#[test]
fn runs_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "full.toml", FULL_SPHERE);
    let a = run_into(&config, &dir.path().join("a"), "1");
    let b = run_into(&config, &dir.path().join("b"), "3");
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn plotdata_round_trips_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "full.toml", FULL_SPHERE);
    let csv = run_into(&config, &dir.path().join("out"), "1");
    let plots = dir.path().join("plots");
    let o = bin(&["plotdata", &csv, "--kind", "eigen", "--out", plots.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(plots.join("eigen.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "series,L,value");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("full-") && lines[1].contains(",2,"));
}

#[test]
fn schema_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let old = dir.path().join("old.csv");
    std::fs::write(&old, "schema_version,config_hash,L,functional,value,witness,wall_time\n0,abc,4,eigen,0.5,,\n").unwrap();
    let o = bin(&["plotdata", old.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("schema version 0"), "{}", stderr(&o));

    let renamed = dir.path().join("renamed.csv");
    std::fs::write(&renamed, "version,hash,L,functional,value\n1,abc,4,eigen,0.5\n").unwrap();
    let o = bin(&["plotdata", renamed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("schema mismatch"));
}

#[test]
fn resource_guard_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = FULL_SPHERE.replace("degrees = [2, 4]", "degrees = [8]\nmax_dim = 50");
    let config = write_config(dir.path(), "big.toml", &text);
    let o = bin(&["run", "--config", &config, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("max_dim"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bad.toml", &FULL_SPHERE.replace("d = 2", "d = 5"));
    let o = bin(&["run", "--config", &config]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("field `d`"), "{}", stderr(&o));
}

#[test]
fn seed_flag_changes_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "full.toml", FULL_SPHERE);
    let out = dir.path().join("out");
    let o = bin(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--seed", "5"]);
    assert!(o.status.success());
    let seeded = stdout(&o);
    assert_ne!(seeded.trim(), run_into(&config, &out, "1"));
}

#[test]
fn verify_reports_one_line_per_criterion() {
    let o = bin(&["verify", "--only", "1,10"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("[PASS]")).count() == 2, "{text}");
}

#[test]
fn verify_with_fault_exits_with_code_one() {
    let o = bin(&["verify", "--only", "1", "--fault", "kernel-normalization"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]  1"));
}

#[test]
fn describe_lists_every_functional() {
    let text = stdout(&bin(&["describe"]));
    for f in ["eigen", "harmonic", "density", "pnorm", "supnorm", "doubling", "ainfty", "rhinfty", "regularize"] {
        assert!(text.contains(f), "{f}");
    }
}
