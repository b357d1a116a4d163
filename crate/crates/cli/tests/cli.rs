use std::path::Path;
use std::process::{Command, Output};

fn ness(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ness"));
    cmd.args(args).env_remove("NESS_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_config(dir: &Path, name: &str, extra: &str) -> String {
    let text = format!(
        r#"{{
            "name": "tiny",
            "model": {{"resonant_level": {{"eps0": 1.0}}}},
            "reservoirs": {{"mu_left": 1.5, "temp_left": 1.0, "mu_right": -1.5, "temp_right": 1.0}},
            "geometry": {{"ell_left": 8, "ell_right": 16}},
            "sweep": {{"kind": "distance", "start": -10, "stop": 20, "step": 10}},
            "measures": [{{"kind": "mi"}}, {{"kind": "negativity"}}]{extra}
        }}"#
    );
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sweep_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", "");
    let out = ness(&["sweep", "--config", &cfg], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("delta_d,ell_mirror,mi_numeric,mi_analytic,mi_numeric_norm,mi_analytic_norm,negativity_numeric"));
    assert!(lines[1].starts_with("-10,"));
}

#[test]
fn sweep_output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", "");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b/b.csv");
    assert_eq!(code(&ness(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap()], &[])), 0);
    assert_eq!(code(&ness(&["sweep", "--config", &cfg, "--out", b.to_str().unwrap()], &[("NESS_THREADS", "1")])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn pipeline_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#", "pipeline": "numeric""#);
    let out = ness(&["sweep", "--config", &cfg, "--pipeline", "analytic"], &[]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(row[2].is_empty() && !row[3].is_empty());
}

#[test]
fn config_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", r#", "pipeline": "sideways""#);
    assert_eq!(code(&ness(&["sweep", "--config", &bad], &[])), 2);
    assert_eq!(code(&ness(&["sweep", "--config", "/nonexistent/config.json"], &[])), 2);
    let good = write_config(dir.path(), "good.json", "");
    assert_eq!(code(&ness(&["sweep", "--config", &good, "--pipeline", "sideways"], &[])), 2);
    assert_eq!(code(&ness(&["sweep", "--config", &good], &[("NESS_THREADS", "zero")])), 2);
    assert_eq!(code(&ness(&["figure", "9z"], &[])), 2);
    assert_eq!(code(&ness(&["frobnicate"], &[])), 2);
}

#[test]
fn row_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#", "quadrature": {"abs_tol": 1e-16, "max_depth": 1}"#);
    let target = dir.path().join("rows.csv");
    let out = ness(&["sweep", "--config", &cfg, "--out", target.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rows failed"));
    // failed rows are still written, with empty value cells
    assert_eq!(std::fs::read_to_string(&target).unwrap().lines().count(), 5);
}

#[test]
fn figure_writes_one_file_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = ness(&["figure", "4b", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["fig4b_eps0_0p5.csv", "fig4b_eps0_1.csv", "fig4b_eps0_2.csv", "fig4b_eps0_4.csv"]);
    let text = std::fs::read_to_string(dir.path().join("fig4b_eps0_1.csv")).unwrap();
    assert!(text.starts_with("delta_mu,delta_d,ell_mirror,mi_numeric"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn fast_verification_lists_every_check() {
    let out = ness(&["verify", "--fast"], &[]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(lines.len(), 10, "{text}");
    for (i, l) in lines.iter().enumerate() {
        assert!(l.contains(&format!("[{}]", i + 1)));
    }
    let all_pass = lines.iter().all(|l| l.starts_with("PASS"));
    assert_eq!(code(&out), if all_pass { 0 } else { 1 });
}
