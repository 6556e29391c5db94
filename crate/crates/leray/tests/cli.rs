use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_leray"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("--config").arg(cfg).arg("--out").arg(out).arg("--quiet").args(extra).output().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn shipped_configs_pass() {
    let dir = tempfile::tempdir().unwrap();
    let mut names: Vec<String> = std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    assert!(names.len() >= 8);
    for name in names {
        let out = dir.path().join(&name);
        let o = run(&config(&name), &out, &[]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let r = report(&out);
        assert_eq!(r["schema"], 1);
        assert_eq!(r["pass"], true, "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        assert_eq!(run(&config("sphere_pair.json"), p, &[]).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.json");
    run(&config("sphere_pair.json"), &c, &["--seed", "99"]);
    assert_eq!(report(&c)["seed"], 99);
}

#[test]
fn floats_are_written_in_fixed_scientific_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    run(&config("circle_cauchy.json"), &out, &[]);
    let text = std::fs::read_to_string(&out).unwrap();
    let norm_line = text.lines().find(|l| l.trim_start().starts_with("\"norm\"")).unwrap();
    assert!(norm_line.contains('e'), "{norm_line}");
    let r = report(&out);
    let norm = r["rungs"][1]["norm"].as_f64().unwrap();
    assert!((norm - 1.0).abs() < 1e-6);
}

#[test]
fn invariants_command_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inv.json");
    assert_eq!(run(&config("lp_sphere_invariants.json"), &out, &[]).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("inv.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("b_abs"), "{header}");
    assert!(lines.count() > 10);
}

#[test]
fn refinement_section_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rigid.json");
    assert_eq!(run(&config("rigid_check.json"), &out, &[]).status.code(), Some(0));
    let r = report(&out);
    let text = serde_json::to_string(&r["refinement"]).unwrap();
    assert!(text.contains("observed_order"), "{text}");
}

#[test]
fn resolution_override_replaces_the_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    run(&config("circle_cauchy.json"), &out, &["--resolution-override", "32"]);
    let r = report(&out);
    assert_eq!(r["resolutions"].as_array().unwrap().len(), 1);
    assert_eq!(r["resolutions"][0], 32);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"schema": 1, "command": "cauchy-norm",
        "surface": {"kind": "ellipse", "a": 2.0, "b": 1.0}, "resolutions": [64],
        "checks": [{"quantity": "norm", "expect": 1.0, "tol": 1e-6}]}"#);
    let out = dir.path().join("r.json");
    assert_eq!(run(&cfg, &out, &[]).status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cases = [
        ("malformed.json", "{ not json"),
        ("schema.json", r#"{"schema": 7, "command": "invariants", "surface": {"kind": "circle"}}"#),
        ("nosurface.json", r#"{"schema": 1, "command": "invariants"}"#),
        ("wrongdim.json", r#"{"schema": 1, "command": "leray-norm", "surface": {"kind": "circle"}}"#),
        ("badexpr.json", r#"{"schema": 1, "command": "invariants", "surface": {"kind": "custom", "n": 2, "expr": "abs(z1"}}"#),
    ];
    for (name, text) in cases {
        let cfg = write(dir.path(), name, text);
        let o = run(&cfg, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists(), "{name} wrote a report");
    }
    let o = bin().arg("--config").arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inadmissible_lambda_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "l.json", r#"{"schema": 1, "command": "rigid-build",
        "lambda": {"expr": "0.4*conj(z1)"}, "resolutions": [32]}"#);
    let o = run(&cfg, &dir.path().join("r.json"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn lambda_grid_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x,y,re,im\n");
    let n = 65;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (0.5 + i as f64 / 64.0, -0.5 + j as f64 / 64.0);
            let z = leray::C64::new(x, y);
            let l = z.conj() / z / 3.0;
            csv.push_str(&format!("{x},{y},{},{}\n", l.re, l.im));
        }
    }
    let grid = write(dir.path(), "lambda.csv", &csv);
    let cfg = write(dir.path(), "b.json", &format!(
        r#"{{"schema": 1, "command": "rigid-build", "lambda": {{"file": {:?}}},
            "checks": [{{"quantity": "beltrami_error", "max": 5e-2}}]}}"#,
        grid.to_str().unwrap()
    ));
    let out = dir.path().join("r.json");
    let o = run(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("r.csv").exists());
}

#[test]
fn stdout_when_no_output_path() {
    let o = bin().arg("--config").arg(config("sphere_dual.json")).arg("--quiet").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "dual");
}
