//! End-to-end tests of the command-line interface: exit codes, report
//! determinism, and the field-file round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_phasegrid")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn phasegrid")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phasegrid-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn tau_prints_unit_values_for_sinc() {
    let out = run(&["tau", "sinc", "0", "0.0", "1.0", "3.0"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1 1 1");
}

#[test]
fn tau_delta_fails_with_exit_two() {
    let out = run(&["tau", "delta", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not summable"));
}

#[test]
fn classify_triangle_spline() {
    let out = run(&["classify", "bspline:1", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("riesz"), "{text}");
    assert!(text.contains("A=0.333"), "{text}");
    assert!(text.contains("B=1.000"), "{text}");
}

#[test]
fn unknown_experiment_exits_one_and_lists_registry() {
    let out = run(&["experiment", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampling-comb"));
}

#[test]
fn list_shows_descriptions() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("counterexample-1"));
    assert!(text.contains("filtering-haar"));
}

#[test]
fn experiment_reports_are_deterministic() {
    // identical config ⇒ byte-identical report CSV
    let d1 = tmpdir("det1");
    let d2 = tmpdir("det2");
    let cfg = r#"{
        "family": "oscillating",
        "params": {"xi0": 2.0},
        "schedule": {"ks": [4, 8, 16], "h": "1/k", "eps": "1/k", "regime": "comparable"},
        "pipeline": {"op": "identity"},
        "testfns": ["gauss_x:0,1.5 x gauss_xi:2,0.5"],
        "predicted": "auto",
        "tol": 0.1
    }"#;
    let cfg_path = d1.join("run.json");
    std::fs::write(&cfg_path, cfg).unwrap();
    let out1 = run(&["experiment", cfg_path.to_str().unwrap(), "--out", d1.to_str().unwrap()]);
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let out2 = run(&["experiment", cfg_path.to_str().unwrap(), "--out", d2.to_str().unwrap()]);
    assert!(out2.status.success());
    let a = std::fs::read(d1.join("config-oscillating.csv")).unwrap();
    let b = std::fs::read(d2.join("config-oscillating.csv")).unwrap();
    assert_eq!(a, b, "reports differ between identical runs");
    let text = String::from_utf8_lossy(&a);
    assert!(text.starts_with("k,h,eps,value_re,value_im,predicted,abs_err\n"));
}

#[test]
fn counterexample_run_exits_zero_with_gap_table() {
    let d = tmpdir("ce");
    let out = run(&["experiment", "counterexample-3", "--out", d.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("converged"), "{text}");
    assert!(text.contains("naive-formula error"), "{text}");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("counterexample-3.json")).unwrap())
            .unwrap();
    assert_eq!(summary["verdict"], "converged");
    assert_eq!(summary["gate"], "Overlap");
    assert!(summary["naive_final_error"].as_f64().unwrap() > 1e-1);
}

#[test]
fn field_pipeline_round_trip_through_files() {
    let d = tmpdir("fields");
    // write a band-limited field by hand
    let n = 512usize;
    let l = 12.0f64;
    let mut csv = String::from("coord,re,im\n");
    for j in 0..n {
        let x = -l + j as f64 * (2.0 * l / n as f64);
        // smooth, effectively band-limited well inside π/h for h=0.5
        // (spectrum ~ e^{-1.5ξ²} at ±1: below 1e-18 at the band edge)
        let v = (-x * x / 6.0).exp() * x.cos();
        csv.push_str(&format!("{x:.17e},{v:.17e},0.0\n"));
    }
    let field_path = d.join("u.csv");
    std::fs::write(&field_path, &csv).unwrap();

    let sampled = d.join("u_sampled.csv");
    let out = run(&[
        "sample",
        field_path.to_str().unwrap(),
        "--profile",
        "sinc",
        "--step",
        "0.5",
        "--output",
        sampled.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let back = d.join("u_back.csv");
    let out = run(&[
        "reconstruct",
        sampled.to_str().unwrap(),
        "--profile",
        "sinc",
        "--step",
        "0.5",
        "--half-length",
        "12",
        "--samples",
        "512",
        "--output",
        back.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // compare: band-limited sampling + reconstruction is the identity here
    let orig = std::fs::read_to_string(&field_path).unwrap();
    let rec = std::fs::read_to_string(&back).unwrap();
    let parse = |text: &str| -> Vec<(f64, f64)> {
        text.lines()
            .skip(1)
            .map(|l| {
                let c: Vec<&str> = l.split(',').collect();
                (c[1].parse().unwrap(), c[2].parse().unwrap())
            })
            .collect()
    };
    let a = parse(&orig);
    let b = parse(&rec);
    let max_err = a
        .iter()
        .zip(&b)
        .map(|((ar, ai), (br, bi))| ((ar - br).powi(2) + (ai - bi).powi(2)).sqrt())
        .fold(0.0f64, f64::max);
    assert!(max_err < 1e-8, "round trip error {max_err}");

    // and a pairing of the original field prints a finite value
    let out = run(&[
        "pair",
        field_path.to_str().unwrap(),
        "--testfn",
        "gauss_x:0,1 x gauss_xi:1.5,0.5",
        "--eps",
        "1.0",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let first: f64 = text.split_whitespace().next().unwrap().parse().unwrap();
    assert!(first.is_finite() && first.abs() > 1e-6, "pairing {text}");
}

#[test]
fn wigner_subcommand_emits_phase_space_grid() {
    let d = tmpdir("wigner");
    let n = 64usize;
    let l = 8.0f64;
    let mut csv = String::from("coord,re,im\n");
    for j in 0..n {
        let x = -l + j as f64 * (2.0 * l / n as f64);
        csv.push_str(&format!("{x:.17e},{:.17e},0.0\n", (-x * x / 2.0).exp()));
    }
    let field_path = d.join("g.csv");
    std::fs::write(&field_path, &csv).unwrap();
    let out_path = d.join("w.csv");
    let out = run(&[
        "wigner",
        field_path.to_str().unwrap(),
        "--eps",
        "1.0",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("coord,coord2,re,im\n"));
    assert_eq!(text.lines().count(), 1 + n * n);
    assert!(!Path::new(&out_path.with_extension("tmp")).exists());
}
