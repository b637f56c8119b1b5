use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ris-sop");

const SMALL: &str = r#"
[scenario]
N = 64
M = 3
L = 2

[sweep]
variable = "P_over_N0_dB"
start = 0.0
stop = 40.0
step = 20.0
schemes = ["SS", "OS"]
methods = ["ClosedForm", "MonteCarlo"]

[mc]
trials = 2000
seed = 7
"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn sweep_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("out.csv");
    let o = run(&["--quiet", "sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = fs::read_to_string(&out).unwrap();
    let curves = ris_sop::experiments::parse_csv(csv.as_bytes()).unwrap();
    assert_eq!(curves.len(), 4);
    assert!(curves.iter().all(|c| c.points.len() == 3));
    let meta = fs::read_to_string(dir.path().join("out.csv.meta.toml")).unwrap();
    assert!(meta.contains("generated_unix"));
    assert!(meta.contains("trials = 2000"));
}

#[test]
fn rerun_from_metadata_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(run(&["--quiet", "sweep", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    let meta = dir.path().join("a.csv.meta.toml");
    let o = run(&["--quiet", "rerun", meta.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let one = run(&["--quiet", "--workers", "1", "sweep", "--config", &cfg]);
    let four = run(&["--quiet", "--workers", "4", "sweep", "--config", &cfg]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = run(&["--quiet", "sweep", "--config", &cfg, "--seed", "99", "--trials", "1500"]);
    assert!(o.status.success());
    let curves = ris_sop::experiments::parse_csv(&o.stdout[..]).unwrap();
    assert!(curves.iter().all(|c| c.seed == 99));
}

#[test]
fn progress_goes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = run(&["sweep", "--config", &cfg]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("running"));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("scheme,method,"));
}

#[test]
fn too_few_trials_is_rejected_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = run(&["--quiet", "sweep", "--config", &cfg, "--trials", "10"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = run(&["--quiet", "sweep", "--config", &cfg, "--trials", "10", "--allow-few-trials"]);
    assert!(o.status.success());
}

#[test]
fn invalid_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "bad.toml", "[scenario]\nN = 64\nbogus = 1\n");
    assert!(!run(&["sweep", "--config", &unknown]).status.success());
    let bad_n = write(dir.path(), "zero.toml", "[scenario]\nN = 0\n");
    assert!(!run(&["sweep", "--config", &bad_n]).status.success());
    let noma_cf = write(dir.path(), "noma.toml", "[sweep]\nschemes = [\"NOMA\"]\nmethods = [\"ClosedForm\"]\n");
    assert!(!run(&["sweep", "--config", &noma_cf]).status.success());
    assert!(!run(&["sweep", "--config", "/nonexistent/x.toml"]).status.success());
    assert!(!run(&["sweep"]).status.success());
    assert!(!run(&["sweep", "--figure", "7"]).status.success());
    assert!(!run(&["sweep", "--figure", "2", "--config", &unknown]).status.success());
}

#[test]
fn figure_preset_runs_analytic_sweep() {
    let o = run(&["--quiet", "sweep", "--figure", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curves = ris_sop::experiments::parse_csv(&o.stdout[..]).unwrap();
    // Two frequencies times SS, OS and both relay modes.
    assert_eq!(curves.len(), 8);
    for c in &curves {
        assert!(c.sops().iter().all(|p| (0.0..=1.0).contains(p)));
    }
}

#[test]
fn crossover_table() {
    let o = run(&["crossover", "--freq", "1e9", "--freq", "2e9"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "f_hz,ris_scheme,relay_scheme,n_star,ris_sop,relay_sop");
    assert_eq!(lines.len(), 3);
}

#[test]
fn show_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let o = run(&["show-config", "--config", &cfg]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    let body = text.split_once('\n').unwrap().1;
    let a = ris_sop::experiments::load_config(body).unwrap();
    let b = ris_sop::experiments::load_config(SMALL).unwrap();
    assert_eq!(a, b);
}
