use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SHORT_SHEAR: &str = r#"
[scenario]
name = "short_shear"

[geometry]
kind = "homogeneous"
flow = "simple_shear"
rate = 1.0

[fluid]
we = 1.0
omega = 0.5

[kernel]
kind = "exponential"

[measure]
kind = "ucm"

[age_grid]
tail_tol = 1e-6

[time]
t_end = 1.0
dt = 0.01
"#;

fn viscomem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_viscomem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn lists_bundled_scenarios() {
    let out = viscomem(&["list-scenarios"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["quiescent", "couette_startup_ucm", "poiseuille_stationary", "channel_startup"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn quiescent_run_has_zero_stress_and_compares_equal_to_itself() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("q");
    let dir_s = dir.to_str().unwrap();
    let out = viscomem(&["run", "--scenario", "quiescent", "--out-dir", dir_s]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(dir.join("manifest.json").exists());

    let stress = fs::read_to_string(dir.join("stress.csv")).unwrap();
    let mut lines = stress.lines();
    assert_eq!(lines.next(), Some("t,tau_xx,tau_xy,tau_yy,n1"));
    let mut rows = 0;
    for line in lines {
        let values: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(values[1..].iter().all(|v| *v == 0.0), "{line}");
        rows += 1;
    }
    assert!(rows > 1);

    let oracle = format!("run:{dir_s}");
    let cmp = viscomem(&["compare", dir_s, "--oracle", &oracle]);
    assert_eq!(code(&cmp), 0, "{}", stderr(&cmp));
    let report = String::from_utf8_lossy(&cmp.stdout);
    assert!(report.contains("result = PASS"));
}

#[test]
fn malformed_config_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = SHORT_SHEAR.replace("omega = 0.5", "omega = 1.5");
    let path = write_config(tmp.path(), "bad.toml", &bad);
    let out = viscomem(&["validate-config", "--config", &path]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("omega"), "{}", stderr(&out));

    let unknown = SHORT_SHEAR.replace("we = 1.0", "we = 1.0\nwobble = 2");
    let path = write_config(tmp.path(), "unknown.toml", &unknown);
    let out = viscomem(&["run", "--config", &path, "--out-dir", tmp.path().join("r").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("wobble"), "{}", stderr(&out));
}

#[test]
fn compare_against_wrong_oracle_fails_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), "shear.toml", SHORT_SHEAR);
    let dir = tmp.path().join("shear");
    let dir_s = dir.to_str().unwrap();
    let out = viscomem(&["run", "--config", &path, "--out-dir", dir_s]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let ok = viscomem(&["compare", dir_s, "--oracle", "ucm-ode"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let wrong = viscomem(&["compare", dir_s, "--oracle", "lcm-ode"]);
    assert_eq!(code(&wrong), 1);
    let unknown = viscomem(&["compare", dir_s, "--oracle", "bogus"]);
    assert_eq!(code(&unknown), 2);
}

#[test]
fn stationary_divergence_exits_with_not_converged() {
    let text = include_str!("../scenarios/poiseuille_stationary.toml").replace("omega = 0.1", "omega = 0.6");
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(tmp.path(), "strong.toml", &text);
    let out = viscomem(&["run", "--config", &path, "--out-dir", tmp.path().join("s").to_str().unwrap()]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}
