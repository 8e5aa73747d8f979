use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ivie_core::model::Scenario;
use serde_json::{json, Value};

fn ivie(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivie"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, n: usize, seed: u64, out: &str) -> PathBuf {
    let cfg = json!({
        "scenario": Scenario::s1(),
        "n_per_level": n,
        "seed": seed,
        "grid": {"j_points": 201, "pad_fraction": 0.1},
        "solver": {"penalty": "second-difference", "lambda": "auto:discrepancy"},
        "output_dir": out,
        "validation": {"density_n": 50000, "condition5_n": 50000, "rate_n": 400000}
    });
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count()
        - 1
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.json", 5_000, 3, "a");
    assert!(
        ivie(dir.path(), &["simulate", "--config", "c.json", "--quiet"])
            .status
            .success()
    );
    assert!(ivie(
        dir.path(),
        &["simulate", "--config", "c.json", "--out", "b", "--quiet"]
    )
    .status
    .success());
    let a = fs::read(dir.path().join("a/samples.csv")).unwrap();
    let b = fs::read(dir.path().join("b/samples.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(data_rows(&dir.path().join("a/samples.csv")), 9 * 5_000);

    assert!(ivie(
        dir.path(),
        &["simulate", "--config", "c.json", "--out", "c", "--seed", "4", "--quiet"]
    )
    .status
    .success());
    assert_ne!(a, fs::read(dir.path().join("c/samples.csv")).unwrap());
}

#[test]
fn full_pipeline_on_reference_scenario() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "s1.json", 200_000, 1, "run");
    for cmd in ["simulate", "estimate", "solve", "validate", "report"] {
        let out = ivie(dir.path(), &[cmd, "--config", "s1.json", "--quiet"]);
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let run = dir.path().join("run");
    assert_eq!(data_rows(&run.join("theta.csv")), 201);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    let fc = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "forward-consistency")
        .unwrap();
    assert_eq!(fc["pass"], true);

    let hash = report["config_hash"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    for name in [
        "samples.csv",
        "kernel.csv",
        "rhs.csv",
        "theta.csv",
        "plotdata.csv",
    ] {
        let first = fs::read_to_string(run.join(name))
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string();
        assert!(
            first.starts_with('#') && first.contains(&hash) && first.contains("\"seed\":1"),
            "{name}: {first}"
        );
    }
    for name in ["solution.json", "report.json"] {
        let v: Value = serde_json::from_str(&fs::read_to_string(run.join(name)).unwrap()).unwrap();
        assert_eq!(v["config_hash"], hash.as_str());
        assert_eq!(v["seed"], 1);
    }
    let summary = fs::read_to_string(run.join("summary.txt")).unwrap();
    assert!(summary.contains(&hash) && summary.contains("seed: 1"));
    let plot = fs::read_to_string(run.join("plotdata.csv")).unwrap();
    assert!(plot.lines().nth(1).unwrap() == "x,theta_hat,theta_true");
}

#[test]
fn estimate_from_config_matches_estimate_from_samples() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.json", 4_000, 8, "x");
    assert!(
        ivie(dir.path(), &["simulate", "--config", "c.json", "--quiet"])
            .status
            .success()
    );
    assert!(
        ivie(dir.path(), &["estimate", "--config", "c.json", "--quiet"])
            .status
            .success()
    );
    assert!(ivie(
        dir.path(),
        &[
            "estimate",
            "--config",
            "c.json",
            "--samples",
            "x/samples.csv",
            "--out",
            "y",
            "--quiet"
        ]
    )
    .status
    .success());
    for name in ["kernel.csv", "rhs.csv"] {
        assert_eq!(
            fs::read(dir.path().join("x").join(name)).unwrap(),
            fs::read(dir.path().join("y").join(name)).unwrap()
        );
    }
}

#[test]
fn zero_kernel_is_a_degenerate_instrument() {
    let dir = tempfile::tempdir().unwrap();
    let meta = r#"{"format":"kernel","baseline_z":0.0,"x_grid":[0.0,0.5,1.0,1.5,2.0],"scenario_id":"t","seed":0}"#;
    fs::write(
        dir.path().join("kernel.csv"),
        format!("# {meta}\nz,0,0.5,1,1.5,2\n1,0,0,0,0,0\n2,0,0,0,0,0\n"),
    )
    .unwrap();
    let rmeta = r#"{"format":"rhs","baseline_z":0.0,"scenario_id":"t","seed":0}"#;
    fs::write(
        dir.path().join("rhs.csv"),
        format!("# {rmeta}\nz,value,noise_scale\n1,0.3,0.01\n2,0.5,0.01\n"),
    )
    .unwrap();
    let out = ivie(
        dir.path(),
        &[
            "solve",
            "--kernel",
            "kernel.csv",
            "--rhs",
            "rhs.csv",
            "--out",
            ".",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate instrument"));
}

#[test]
fn exit_codes_by_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let usage = ivie(dir.path(), &["simulate"]);
    assert_eq!(usage.status.code(), Some(1));
    let usage = ivie(dir.path(), &["estimate", "--quiet"]);
    assert_eq!(usage.status.code(), Some(1));
    let bad_lambda = ivie(dir.path(), &["solve", "--lambda", "auto:gcv"]);
    assert_eq!(bad_lambda.status.code(), Some(1));

    let missing = ivie(dir.path(), &["simulate", "--config", "nope.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.json"));

    fs::write(
        dir.path().join("bad.json"),
        r#"{"scenario": {"id": "x"}, "n_per_level": 10}"#,
    )
    .unwrap();
    assert_eq!(
        ivie(dir.path(), &["simulate", "--config", "bad.json"])
            .status
            .code(),
        Some(2)
    );

    fs::write(
        dir.path().join("s.csv"),
        "z,x,y\n0,1,2\n0,2,oops\n1,0.5,1\n",
    )
    .unwrap();
    let parse = ivie(
        dir.path(),
        &["estimate", "--samples", "s.csv", "--out", "."],
    );
    assert_eq!(parse.status.code(), Some(2));
    let err = String::from_utf8_lossy(&parse.stderr);
    assert!(err.contains("s.csv:3"), "{err}");
}

#[test]
fn external_samples_without_header() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("z,x,y\n");
    for z in [0.0, 1.0, 2.0] {
        for k in 0..200 {
            let x = z + (k as f64 * 0.37).sin() * 2.0;
            csv.push_str(&format!("{z},{x},{}\n", x.tanh()));
        }
    }
    fs::write(dir.path().join("data.csv"), csv).unwrap();
    let out = ivie(
        dir.path(),
        &["estimate", "--samples", "data.csv", "--out", "o", "--quiet"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = ivie(
        dir.path(),
        &["solve", "--out", "o", "--lambda", "auto:l-curve", "--quiet"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let sol: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/solution.json")).unwrap())
            .unwrap();
    assert_eq!(sol["scenario_id"], "external");
    assert_eq!(sol["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(sol["lambda_rule"], "auto:l-curve");
    let out = ivie(dir.path(), &["report", "--run", "o", "--quiet"]);
    assert!(out.status.success());
    let plot = fs::read_to_string(dir.path().join("o/plotdata.csv")).unwrap();
    assert_eq!(plot.lines().nth(1).unwrap(), "x,theta_hat");
}
