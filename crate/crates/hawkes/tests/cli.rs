//! End-to-end checks of the `hawkes` binary: golden CSV schemas, artifact
//! determinism under fixed seeds, and the exit-code contract.

use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hawkes-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn bivariate_json() -> &'static str {
    r#"{
  "schema": 1,
  "dimension": 2,
  "base_rates": [0.5, 0.5],
  "kernels": [
    [{"type": "exponential", "alpha": 2.3}, {"type": "exponential", "alpha": 2.3}],
    [{"type": "exponential", "alpha": 2.0}, {"type": "exponential", "alpha": 2.0}]
  ],
  "jumps": [
    [{"type": "constant", "size": 1.3}, {"type": "constant", "size": 0.6}],
    [{"type": "constant", "size": 0.8}, {"type": "constant", "size": 0.5}]
  ],
  "sojourns": [
    {"type": "exponential", "rate": 2.0},
    {"type": "exponential", "rate": 2.0}
  ]
}"#
}

fn tail_json() -> &'static str {
    r#"{
  "schema": 1,
  "dimension": 2,
  "base_rates": [0.5, 1.5],
  "kernels": [
    [{"type": "zero"}, {"type": "exponential", "alpha": 1.5}],
    [{"type": "zero"}, {"type": "exponential", "alpha": 1.5}]
  ],
  "jumps": [
    [{"type": "zero"}, {"type": "constant", "size": 1.0}],
    [{"type": "zero"}, {"type": "pareto_tail", "c": 1.0, "gamma": 1.8}]
  ],
  "sojourns": [{"type": "infinite"}, {"type": "infinite"}]
}"#
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hawkes"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn validate_reports_stability() {
    let dir = workdir("validate");
    let model = dir.join("bivariate.json");
    std::fs::write(&model, bivariate_json()).unwrap();
    let out = run(&["validate", "--model", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("model admissible"), "{text}");
    assert!(text.contains("stable, rho = 0.7670"), "{text}");
    assert!(text.contains("2.2794"), "{text}");
}

#[test]
fn validate_rejects_inadmissible_models() {
    let dir = workdir("invalid");
    let model = dir.join("bad.json");
    std::fs::write(&model, bivariate_json().replace("\"p\": 2.5", "\"p\": 2.5")).unwrap();
    // break a constraint: non-positive base rate
    std::fs::write(&model, bivariate_json().replace("[0.5, 0.5]", "[0.0, 0.5]")).unwrap();
    let out = run(&["validate", "--model", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("base rate must be positive"), "{text}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = workdir("config");
    let model = dir.join("unknown-key.json");
    std::fs::write(&model, bivariate_json().replace("\"schema\"", "\"schema_v\"")).unwrap();
    let out = run(&["validate", "--model", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.join("missing.json");
    let out = run(&["simulate", "--model", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unstable_models_are_out_of_scope() {
    let dir = workdir("unstable");
    let model = dir.join("unstable.json");
    std::fs::write(
        &model,
        bivariate_json().replace("\"size\": 1.3", "\"size\": 13.0"),
    )
    .unwrap();
    let out = run(&["simulate", "--model", model.to_str().unwrap(), "--horizon", "1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn path_export_is_deterministic_with_golden_schema() {
    let dir = workdir("path");
    let model = dir.join("bivariate.json");
    std::fs::write(&model, bivariate_json()).unwrap();
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "simulate",
            "--model",
            model.to_str().unwrap(),
            "--horizon",
            "4",
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(res.status.code(), Some(0));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same config and seed must produce identical artifacts");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("event_id,time,component,generation,parent_id,sojourn\n"));

    // manifests exist and are identical too
    let ma = std::fs::read(dir.join("a.csv.manifest.json")).unwrap();
    let text = String::from_utf8(ma).unwrap();
    assert!(text.contains("\"tool\": \"hawkes\""), "{text}");
    assert!(text.contains("\"seed\": 11"), "{text}");

    // a different seed must change the artifact
    let out_c = dir.join("c.csv");
    run(&[
        "simulate",
        "--model",
        model.to_str().unwrap(),
        "--horizon",
        "4",
        "--seed",
        "12",
        "--out",
        out_c.to_str().unwrap(),
    ]);
    assert_ne!(std::fs::read(&out_c).unwrap(), b);
}

#[test]
fn estimator_table_schema() {
    let dir = workdir("table");
    let model = dir.join("bivariate.json");
    std::fs::write(&model, bivariate_json()).unwrap();
    let out = run(&[
        "simulate",
        "--model",
        model.to_str().unwrap(),
        "--t-grid",
        "0:2:3",
        "--runs",
        "200",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,statistic,value,std_error\n"), "{text}");
    assert!(text.contains("mean_q_1"), "{text}");
    assert!(text.contains("cross_qlambda_2_1"), "{text}");
}

#[test]
fn transform_prints_value_iterations_residual() {
    let dir = workdir("transform");
    let model = dir.join("bivariate.json");
    std::fs::write(&model, bivariate_json()).unwrap();
    let out = run(&[
        "transform",
        "--model",
        model.to_str().unwrap(),
        "--t",
        "2",
        "--z",
        "0.9,1",
        "--s",
        "0,0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("value = "), "{text}");
    assert!(text.contains("iterations = "), "{text}");
    assert!(text.contains("residual = "), "{text}");
}

#[test]
fn pmf_and_moments_and_graph_schemas() {
    let dir = workdir("schemas");
    let model = dir.join("bivariate.json");
    std::fs::write(&model, bivariate_json()).unwrap();

    let out = run(&[
        "pmf",
        "--model",
        model.to_str().unwrap(),
        "--t",
        "1",
        "--component",
        "1",
        "--max-k",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,probability\n"), "{text}");
    assert_eq!(text.lines().count(), 22);

    let out = run(&[
        "moments",
        "--model",
        model.to_str().unwrap(),
        "--t-grid",
        "0:1:2",
        "--stats",
        "mean_q_1,mean_lambda_2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,statistic,value,error_estimate\n"), "{text}");

    let out = run(&["graph", "--model", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("class_id,members,recurrent,gamma_bar\n"), "{text}");
    assert!(text.contains("0,1|2,true,"), "{text}");
}

#[test]
fn tails_produces_curve_data_and_scope_errors() {
    let dir = workdir("tails");
    let heavy = dir.join("tail.json");
    std::fs::write(&heavy, tail_json()).unwrap();
    let out = run(&[
        "tails",
        "--model",
        heavy.to_str().unwrap(),
        "--t",
        "1",
        "--thresholds",
        "5,10,20",
        "--runs",
        "4000",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,component,asymptote,mc_estimate,mc_ci_lo,mc_ci_hi\n"), "{text}");
    // two components at three thresholds
    assert_eq!(text.lines().count(), 7);

    // a light-tailed model has no power-law asymptote to report
    let light = dir.join("bivariate.json");
    std::fs::write(&light, bivariate_json()).unwrap();
    let out = run(&[
        "tails",
        "--model",
        light.to_str().unwrap(),
        "--t",
        "1",
        "--thresholds",
        "5",
        "--runs",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(4));

    // gamma outside (1, 2) is out of scope
    let out_of_range = dir.join("gamma25.json");
    std::fs::write(&out_of_range, tail_json().replace("1.8", "2.5")).unwrap();
    let out = run(&[
        "tails",
        "--model",
        out_of_range.to_str().unwrap(),
        "--t",
        "1",
        "--thresholds",
        "5",
        "--runs",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(4));
}
