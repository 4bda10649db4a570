use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn cuspsum(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspsum"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn cuspsum")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Drops the provenance comment and parses the rest as CSV rows.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# cuspsum "));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn coeffs_writes_tau() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspsum(dir.path(), &["coeffs", "--weight", "12", "--nmax", "100", "--out", "tau.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&std::fs::read_to_string(dir.path().join("tau.csv")).unwrap());
    assert_eq!(rows[0], ["n", "a"]);
    assert_eq!(rows[2], ["2", "-24"]);
    assert_eq!(rows.len(), 101);
}

#[test]
fn sums_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspsum(dir.path(), &["sums", "--weight", "12", "--x", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[1][0], "1");
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn verify_plancherel_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspsum(dir.path(), &["verify", "plancherel", "--gamma", "0.3", "--T", "1", "--phi", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["check"], "plancherel");
    assert!(v["provenance"]["config"].as_str().unwrap().len() == 64);
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspsum(dir.path(), &["coeffs", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(cuspsum(dir.path(), &["verify", "nope"]).status.code(), Some(1));
    assert_eq!(cuspsum(dir.path(), &["coeffs", "--nmax", "5"]).status.code(), Some(1));
    assert_eq!(cuspsum(dir.path(), &["coeffs", "--weight", "14"]).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.cfg"), "colour = blue\n").unwrap();
    assert_eq!(cuspsum(dir.path(), &["--config", "bad.cfg", "coeffs"]).status.code(), Some(1));
}

#[test]
fn computation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("cache")).unwrap();
    std::fs::write(dir.path().join("cache/k12_n100.cache"), "CUSPSUM1 weight=12 level=1 nmax=1\n1,1\nsha256=00\n").unwrap();
    let o = cuspsum(dir.path(), &["--cache-dir", "cache", "coeffs"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_applies_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# sweep\nweight = 16\nnmax = 20\nformat = json\n").unwrap();
    let o = cuspsum(dir.path(), &["--config", "run.cfg", "coeffs"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["weight"].as_u64(), v["nmax"].as_u64()), (Some(16), Some(20)));
    assert_eq!(v["rows"][1]["a"], "216");
    let o = cuspsum(dir.path(), &["--config", "run.cfg", "coeffs", "--weight", "12"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"][1]["a"], "-24");
}

#[test]
fn identical_config_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["zeros", "--tmax", "20", "--nmax", "2000", "--out", "z.txt"];
    cuspsum(dir.path(), &args);
    let first = std::fs::read(dir.path().join("z.txt")).unwrap();
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    cuspsum(dir.path(), &threaded);
    assert_eq!(std::fs::read(dir.path().join("z.txt")).unwrap(), first);
}

#[test]
fn zero_table_output_imports_back() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspsum(
        dir.path(),
        &["zeros", "--tmax", "30", "--nmax", "2000", "--out", "z.txt", "--compare"],
    );
    assert_eq!(o.status.code(), Some(1), "missing value is a usage error");
    let reference = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/delta_zeros_mpmath.txt");
    let o = cuspsum(
        dir.path(),
        &["zeros", "--tmax", "30", "--nmax", "2000", "--format", "json", "--compare", reference.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["comparison"]["matched"], 8);
    assert!(v["comparison"]["max_deviation"].as_f64().unwrap() < 1e-4);
}
