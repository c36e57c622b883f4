use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperdelta")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn smoke() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/configs/smoke.json")
}

#[test]
fn smoke_config_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--config", smoke(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("gaussian-1x1: PASS value=0.282095"), "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let value = report["cases"][0]["report"]["lhs_localized"]["value"].as_f64().unwrap();
    assert!((value - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-9);
}

#[test]
fn coincident_roots_are_reported_divergent() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"seed": 1, "cases": [{"u": [0.5, 0.5], "v": [0.0]}]}"#);
    let out = tmp.path().join("out");
    std::fs::create_dir(&out).unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("case1: DIVERGENT (u1 = u2)"), "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert!(report["cases"][0]["report"]["divergence"].is_object());
}

#[test]
fn malformed_configs_exit_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    std::fs::create_dir(&out).unwrap();
    let bad = [
        r#"{"seed": 1, "cases": [{"u": [0.0], "v": [0.0], "colour": 3}]}"#,
        r#"{"cases": [{"u": [0.0], "v": [0.0]}]}"#,
        r#"{"seed": 1, "cases": [{"u": [0.0], "v": "x"}]}"#,
        "not json",
    ];
    for (i, text) in bad.iter().enumerate() {
        let cfg = write(tmp.path(), &format!("bad{i}.json"), text);
        let o = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert_eq!(std::fs::read_dir(&out).unwrap().count(), 0);
    }
    let missing = tmp.path().join("nope.json");
    assert_eq!(run(&["verify", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn expand_j_examples() {
    let o = run(&["expand-j", "--sizes", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");

    // for a single u the divided difference of the linear P is just −a
    let o = run(&["expand-j", "--sizes", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1");

    let o = run(&["expand-j", "--sizes", "2,2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for var in ["u1", "u2", "v1", "v2"] {
        assert!(text.contains(var), "{text}");
    }

    let o = run(&["expand-j", "--sizes", "3,3", "--a", "2", "--b", "-1/3"]);
    assert_eq!(o.status.code(), Some(0));

    assert_eq!(run(&["expand-j", "--sizes", "5,1"]).status.code(), Some(2));
    assert_eq!(run(&["expand-j", "--sizes", "2,2", "--a", "0"]).status.code(), Some(2));
    assert_eq!(run(&["expand-j", "--sizes", "2,2", "--a", "x"]).status.code(), Some(2));
}

fn integrate(dir: &Path, factors: &str) -> Output {
    let text = format!(
        r#"{{"seed": 7, "factors": {factors},
            "test_function": {{"kind": "gaussian", "center": [0, 0], "width": 1}}}}"#
    );
    let cfg = write(dir, "i.json", &text);
    run(&["integrate", "--config", cfg.to_str().unwrap()])
}

#[test]
fn integrate_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let o = integrate(tmp.path(), r#"[{"gradient": [1, 0]}, {"gradient": [1, 0], "offset": -1}]"#);
    assert_eq!(o.status.code(), Some(0));
    let value: f64 = stdout(&o).split_whitespace().next().unwrap().parse().unwrap();
    assert!((value - 0.640913).abs() < 1e-6, "{value}");

    let o = integrate(tmp.path(), r#"[{"gradient": [1, 0]}, {"gradient": [0, 1]}]"#);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "DIVERGENT (pair 1,2)");

    // single factor 2y1 − 1: φ₁(1/2)/2 for the standard normal marginal
    let o = integrate(tmp.path(), r#"[{"gradient": [2, 0], "offset": -1}]"#);
    let value: f64 = stdout(&o).split_whitespace().next().unwrap().parse().unwrap();
    let closed = (-0.125f64).exp() / (2.0 * std::f64::consts::PI).sqrt() / 2.0;
    assert!((value - closed).abs() < 1e-12, "{value} vs {closed}");

    let o = integrate(tmp.path(), r#"[{"gradient": [0, 0]}]"#);
    assert_eq!(o.status.code(), Some(2));
    let o = integrate(tmp.path(), r#"[{"gradient": [1, 0, 0]}]"#);
    assert_eq!(o.status.code(), Some(2));
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn horn_degenerate_orbit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "h.json",
        r#"{"alpha": [1, -1, 0], "beta": [0, 0, 0], "samples": 20000, "seed": 9}"#,
    );
    let out = tmp.path().join("out");
    std::fs::create_dir(&out).unwrap();
    let o = run(&["--workers", "1", "horn", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["mc_grid.csv", "localized_grid.csv"] {
        let rows = read_csv(&out.join(name));
        assert_eq!(rows[0], ["p_lo", "p_hi", "q_lo", "q_hi", "value", "stderr", "flag"]);
        let nonzero: Vec<&Vec<String>> = rows[1..].iter().filter(|r| r[4].parse::<f64>().unwrap() != 0.0).collect();
        assert_eq!(nonzero.len(), 1, "{name}");
        let r = nonzero[0];
        let (p_lo, p_hi): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let (q_lo, q_hi): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!(p_lo <= -1.0 && -1.0 <= p_hi && q_lo <= 0.0 && 0.0 <= q_hi, "{r:?}");
    }
    let compare = read_csv(&out.join("compare.csv"));
    assert_eq!(compare.len(), 401);
}

#[test]
fn horn_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let good = write(tmp.path(), "h.json", r#"{"alpha": [1, 0, -1], "beta": [1, 0, -1], "samples": 10, "seed": 1}"#);
    let missing = tmp.path().join("missing");
    let o = run(&["horn", "--config", good.to_str().unwrap(), "--out", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not exist"));

    let out = tmp.path().join("out");
    std::fs::create_dir(&out).unwrap();
    for text in [
        r#"{"alpha": [1, 0, 0], "beta": [1, 0, -1], "samples": 10, "seed": 1}"#,
        r#"{"alpha": [1, 0, -1], "beta": [1, 0, -1], "samples": 10}"#,
        r#"{"alpha": [1, 0, -1], "beta": [1, 0, -1], "samples": 10, "seed": 1, "localized": {"scan_points": 0}}"#,
    ] {
        let cfg = write(tmp.path(), "bad.json", text);
        let o = run(&["horn", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert_eq!(std::fs::read_dir(&out).unwrap().count(), 0);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let smoke_runs: Vec<Output> = (0..2).map(|_| run(&["--workers", "2", "verify", "--config", smoke()])).collect();
    assert_eq!(smoke_runs[0].stdout, smoke_runs[1].stdout);

    let cfg = write(
        tmp.path(),
        "h.json",
        r#"{"alpha": [1, 0, -1], "beta": [2, -1, -1], "samples": 50000, "seed": 4,
            "grid": {"p_range": [-6, 0.1], "q_range": [-4, 4], "bins": 3}}"#,
    );
    let mut snapshots = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("out{k}"));
        std::fs::create_dir(&out).unwrap();
        let o = run(&["--workers", "2", "horn", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let files: Vec<Vec<u8>> = ["mc_grid.csv", "localized_grid.csv", "compare.csv"]
            .iter()
            .map(|n| std::fs::read(out.join(n)).unwrap())
            .collect();
        snapshots.push((o.stdout, files));
    }
    assert_eq!(snapshots[0], snapshots[1]);
}
