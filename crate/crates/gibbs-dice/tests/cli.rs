//! End-to-end tests of the `gibbs-dice` binary: exit codes, output formats,
//! determinism, and the documented command examples.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gibbs-dice"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("json output")
}

fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("gibbs-dice-cli-{}-{name}", std::process::id()))
}

#[test]
fn fit_budden_reproduces_the_published_beta() {
    let out = run(&["fit", "--builtin", "budden", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    let beta = v["results"]["beta_hat"].as_f64().unwrap();
    assert!((beta - 4.46).abs() < 0.02, "{beta}");
    assert_eq!(v["results"]["converged"], serde_json::json!(true));
    assert_eq!(v["input"]["normalization"], "geometric-mean");
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 15);
}

#[test]
fn fit_control_with_norm_flag() {
    let out = run(&[
        "fit",
        "--builtin",
        "control-I",
        "--norm",
        "half-diagonal",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let beta = json(&out)["results"]["beta_hat"].as_f64().unwrap();
    assert!((beta - 4.90).abs() < 0.05, "{beta}");
}

#[test]
fn fit_recovers_beta_from_exact_model_counts() {
    // counts proportional to the model at beta = 7
    let probs = gibbs_dice::gibbs_probabilities(
        &gibbs_dice::cuboid_energies(
            &gibbs_dice::CuboidSpec::new(13.0, 20.0, 23.0).unwrap(),
            gibbs_dice::EnergyNormalization::HalfDiagonal,
        )
        .unwrap(),
        7.0,
    )
    .unwrap();
    let counts: Vec<String> = probs
        .iter()
        .map(|p| ((p * 1e7).round() as u64).to_string())
        .collect();
    let path = tmp_path("selfconsistent.csv");
    std::fs::write(
        &path,
        format!("sides,13,20,23\ncounts,{}\n", counts.join(",")),
    )
    .unwrap();
    let out = run(&["fit", "--file", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let beta = json(&out)["results"]["beta_hat"].as_f64().unwrap();
    assert!((beta - 7.0).abs() < 1e-3, "{beta}");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn predict_prints_the_published_rows() {
    let out = run(&[
        "predict",
        "--cuboid",
        "13x20x23",
        "--beta",
        "10.2",
        "--norm",
        "half-diagonal",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for cell in ["5.0", "2.0", "43.0"] {
        assert!(text.contains(cell), "{text}");
    }

    let out = run(&[
        "predict", "--cuboid", "13x20x23", "--model", "simpson", "--format", "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let p = v["results"]["probabilities"].as_array().unwrap();
    let expected = [13.5, 10.5, 26.0, 26.0, 10.5, 13.5];
    for (got, want) in p.iter().zip(expected) {
        assert!((100.0 * got.as_f64().unwrap() - want).abs() <= 0.1);
    }

    let out = run(&["predict", "--cuboid", "10x10x10", "--beta", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).matches("16.7").count(), 6);
}

#[test]
fn predict_heights_and_xxy_geometries() {
    let out = run(&[
        "predict",
        "--heights",
        "10,11.5,7.61,5.39,11.5,10",
        "--scale",
        "16.45",
        "--beta",
        "5.11",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let p = json(&out)["results"]["probabilities"].as_array().unwrap()[3]
        .as_f64()
        .unwrap();
    assert!(100.0 * p > 43.6 && 100.0 * p < 43.9, "{p}");

    let out = run(&[
        "predict", "--xxy", "15x7.1", "--beta", "4.46", "--format", "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let pxx = v["results"]["p_xx"].as_f64().unwrap();
    assert!((pxx - 0.910).abs() < 2e-3);
    let pxy = v["results"]["p_xy"].as_f64().unwrap();
    assert!((pxx + pxy - 1.0).abs() < 1e-12);
}

#[test]
fn gof_reproduces_the_chi_square_rule_values() {
    let out = run(&["gof", "--builtin", "budden", "--fit", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["results"]["chi2_per_m"].as_f64().unwrap() - 6.2).abs() < 0.3);
    assert_eq!(v["results"]["verdict"], "rejected");

    let out = run(&[
        "gof",
        "--builtin",
        "heilbronner",
        "--fit",
        "--format",
        "json",
    ]);
    let v = json(&out);
    assert!((v["results"]["chi2_per_m"].as_f64().unwrap() - 6.6).abs() < 0.3);
}

#[test]
fn gof_on_perfect_synthetic_data_is_zero() {
    let mut lines = vec!["sx,sy,N,nxx".to_string()];
    for ratio in [0.5f64, 0.9, 1.4, 2.0] {
        let (sx, sy) = (20.0, 20.0 * ratio);
        let n = 1_000_000u64;
        let p = gibbs_dice::xxy_pxx(sx, sy, 4.0).unwrap();
        lines.push(format!("{sx},{sy},{n},{}", (p * n as f64).round() as u64));
    }
    let path = tmp_path("perfect.csv");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    let out = run(&[
        "gof",
        "--file",
        path.to_str().unwrap(),
        "--beta",
        "4.0",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["results"]["chi2"].as_f64().unwrap() < 1e-4);
    assert_eq!(v["results"]["verdict"], "consistent");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn bootstrap_is_deterministic_for_a_seed() {
    let args = [
        "bootstrap",
        "--builtin",
        "heilbronner",
        "--epsilon",
        "0.05",
        "--iterations",
        "199",
        "--seed",
        "1",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(
        a.stdout, b.stdout,
        "identical invocations must yield identical bytes"
    );
    let v = json(&a);
    let p = v["results"]["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(
        v["results"]["chi2_simulated"].as_array().unwrap().len(),
        199
    );

    let c = run(&[
        "bootstrap",
        "--builtin",
        "heilbronner",
        "--epsilon",
        "0.05",
        "--iterations",
        "199",
        "--seed",
        "2",
        "--format",
        "json",
    ]);
    assert_ne!(
        a.stdout, c.stdout,
        "a different seed must change the sample"
    );
}

#[test]
fn bootstrap_single_iteration_p_value_is_zero_or_one() {
    let out = run(&[
        "bootstrap",
        "--builtin",
        "budden",
        "--epsilon",
        "0.05",
        "--iterations",
        "1",
        "--seed",
        "5",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let p = json(&out)["results"]["p_value"].as_f64().unwrap();
    assert!(p == 0.0 || p == 1.0);
}

#[test]
fn simulate_edge_cases_and_moments() {
    let out = run(&[
        "simulate", "--cuboid", "13x20x23", "--beta", "2", "--tosses", "0", "--format", "json",
    ]);
    assert!(out.status.success());
    let counts = json(&out)["results"]["counts"].as_array().unwrap().clone();
    assert!(counts.iter().all(|c| c.as_u64().unwrap() == 0));

    // beta = 0 over 600k tosses: every face within 4 standard deviations
    let out = run(&[
        "simulate", "--cuboid", "13x20x23", "--beta", "0", "--tosses", "600000", "--seed", "11",
        "--format", "json",
    ]);
    let counts = json(&out)["results"]["counts"].as_array().unwrap().clone();
    let sd = (600_000.0f64 / 6.0 * (5.0 / 6.0)).sqrt();
    for c in &counts {
        assert!((c.as_u64().unwrap() as f64 - 100_000.0).abs() <= 4.0 * sd);
    }
}

#[test]
fn simulated_counts_feed_back_into_fit() {
    let out = run(&[
        "simulate", "--cuboid", "13x20x23", "--beta", "5", "--tosses", "1000000", "--seed", "3",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let counts: Vec<String> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(counts.len(), 6);
    let path = tmp_path("roundtrip.csv");
    std::fs::write(
        &path,
        format!("sides,13,20,23\ncounts,{}\n", counts.join(",")),
    )
    .unwrap();
    let out = run(&["fit", "--file", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let beta = json(&out)["results"]["beta_hat"].as_f64().unwrap();
    assert!((beta - 5.0).abs() < 0.05, "{beta}");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn plot_emits_the_two_series_figure() {
    let path = tmp_path("fig.svg");
    let args = [
        "plot",
        "--builtin",
        "budden",
        "--builtin",
        "heilbronner",
        "--fit",
        "--out",
        path.to_str().unwrap(),
        "--format",
        "json",
    ];
    let out = run(&args);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["results"]["data_markers"], 22);
    assert_eq!(v["results"]["model_curves"], 2);
    let svg1 = std::fs::read(&path).unwrap();
    assert!(String::from_utf8_lossy(&svg1).starts_with("<svg"));
    // repeated runs produce identical bytes
    assert!(run(&args).status.success());
    let svg2 = std::fs::read(&path).unwrap();
    assert_eq!(svg1, svg2);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn plot_requires_xxy_data_and_a_dataset() {
    let path = tmp_path("never.svg");
    let out = run(&["plot", "--fit", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "no dataset is a usage error");
    let out = run(&[
        "plot",
        "--builtin",
        "control-I",
        "--fit",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "non-xxy dataset is a data error"
    );
}

#[test]
fn exit_codes_and_error_channels() {
    // usage errors -> 1
    assert_eq!(run(&["fit"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["gof", "--builtin", "budden"]).status.code(), Some(1));
    assert_eq!(
        run(&["predict", "--cuboid", "1x2x3", "--model", "simpson", "--beta", "4"])
            .status
            .code(),
        Some(1)
    );
    // data/model errors -> 2
    assert_eq!(
        run(&["fit", "--builtin", "nonesuch"]).status.code(),
        Some(2)
    );
    let bad = tmp_path("bad.csv");
    std::fs::write(&bad, "sx,sy,N,nxx\n15,7.1,10,60\n").unwrap();
    let out = run(&["fit", "--file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let _ = std::fs::remove_file(&bad);
    // help -> 0
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_output_is_byte_stable() {
    let args = ["fit", "--builtin", "heilbronner", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn format_env_var_sets_the_default() {
    let out = bin()
        .args(["gof", "--builtin", "budden", "--beta", "4.46"])
        .env("GIBBS_DICE_FORMAT", "json")
        .output()
        .unwrap();
    assert!(stdout(&out).trim_start().starts_with('{'));
    // an explicit flag wins over the environment
    let out = bin()
        .args([
            "gof",
            "--builtin",
            "budden",
            "--beta",
            "4.46",
            "--format",
            "table",
        ])
        .env("GIBBS_DICE_FORMAT", "json")
        .output()
        .unwrap();
    assert!(stdout(&out).starts_with("dataset"));
}
