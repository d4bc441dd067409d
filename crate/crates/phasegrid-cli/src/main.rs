//! Command-line front end: run named experiments, evaluate Gram functions
//! and basis classifications, apply the sampling/reconstruction/projection
//! operators to field files, and emit pairing values and plot-ready CSV.
//!
//! Exit codes: 0 on success (experiments additionally require a converged
//! verdict), 1 on usage/parse errors, 2 on verification failures (structural
//! gate violations outside counterexample mode, non-certifiable Gram tails,
//! or a non-converged verdict).

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use phasegrid::experiments::{
    find_experiment, registry, run_experiment, ConvergenceReport, RunConfig, Verdict,
};
use phasegrid::operators::{project, reconstruct, sample};
use phasegrid::profiles::{basis_classify, parse_profile_spec, tau};
use phasegrid::testfn::parse_testfn_spec;
use phasegrid::wigner::{pair_continuous, pair_discrete, wigner_transform};
use phasegrid::{Dim, Error, SpatialWindow};

#[derive(Parser)]
#[command(
    name = "phasegrid",
    version,
    about = "Sampling/reconstruction operators and phase-space measure verification on regular grids"
)]
struct Cli {
    /// Output directory for reports and summaries.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Override the experiment tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed recorded in summaries (the harness itself is deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a named experiment from the registry, or a JSON config file.
    Experiment {
        /// Registry name (see `list`) or a path to a JSON config.
        target: String,
    },
    /// List the registered experiments.
    List,
    /// Evaluate the Gram function τ_{⟨D⟩^s φ} at frequencies.
    Tau {
        profile: String,
        s: f64,
        #[arg(required = true)]
        xi: Vec<f64>,
    },
    /// Classify the translate system of a profile (orthonormal/Riesz/...).
    Classify {
        profile: String,
        s: f64,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        class_tol: f64,
    },
    /// Sample a continuous field file at step h.
    Sample {
        input: PathBuf,
        #[arg(long)]
        profile: String,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Reconstruct a discrete field file onto a window.
    Reconstruct {
        input: PathBuf,
        #[arg(long)]
        profile: String,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        half_length: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Orthogonal projection of a continuous field onto a translate range.
    Project {
        input: PathBuf,
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0.0)]
        exponent: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Phase-space pairing of a field file against a test function.
    Pair {
        input: PathBuf,
        /// e.g. "gauss_x:0,1 x gauss_xi:2,0.25"
        #[arg(long)]
        testfn: String,
        #[arg(long)]
        eps: f64,
        /// Treat the input as a discrete field with this step.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Emit the Wigner transform of a continuous field as CSV (x, ξ, re, im).
    Wigner {
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NonSummableTail { .. }
        | Error::DiscontinuityMass { .. }
        | Error::TranslateOverlap { .. }
        | Error::CertificateViolated(_) => 2,
        _ => 1,
    }
}

fn dispatch(cli: &Cli) -> phasegrid::Result<ExitCode> {
    match &cli.cmd {
        Cmd::List => {
            for exp in registry() {
                println!("{:32} {}", exp.name, exp.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Experiment { target } => cmd_experiment(cli, target),
        Cmd::Tau { profile, s, xi } => {
            let p = parse_profile_spec(profile)?;
            let values: Vec<String> = xi
                .iter()
                .map(|&x| tau(&p, *s, &[x], 1e-8).map(|v| format!("{v}")))
                .collect::<phasegrid::Result<_>>()?;
            println!("{}", values.join(" "));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Classify { profile, s, grid, class_tol } => {
            let p = parse_profile_spec(profile)?;
            let c = basis_classify(&p, *s, *grid, *class_tol, 1)?;
            println!("{} A={:.6} B={:.6}", c.verdict, c.lower_a, c.upper_b);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sample { input, profile, step, output } => {
            let p = parse_profile_spec(profile)?;
            let u = io::read_continuous(input)?;
            let s = sample(&u, &p, *step)?;
            io::write_discrete(output, &s)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Reconstruct { input, profile, step, half_length, samples, output } => {
            let p = parse_profile_spec(profile)?;
            let u = io::read_discrete(input, *step)?;
            let window = SpatialWindow::new(Dim::One, *half_length, *samples)?;
            let f = reconstruct(&u, &p, *step, window)?;
            io::write_continuous(output, &f)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Project { input, profile, exponent, step, output } => {
            let p = parse_profile_spec(profile)?;
            let u = io::read_continuous(input)?;
            let f = project(&u, &p, *exponent, *step)?;
            io::write_continuous(output, &f)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Pair { input, testfn, eps, step } => {
            let a = parse_testfn_spec(testfn)?;
            let v = match step {
                Some(h) => pair_discrete(&io::read_discrete(input, *h)?, *eps, &a)?,
                None => pair_continuous(&io::read_continuous(input)?, *eps, &a)?,
            };
            println!("{} {}", io::fmt(v.re), io::fmt(v.im));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Wigner { input, eps, output } => {
            let u = io::read_continuous(input)?;
            let w = wigner_transform(&u, *eps)?;
            let mut out = String::from("coord,coord2,re,im\n");
            for (ix, &x) in w.x_nodes.iter().enumerate() {
                for (iq, &xi) in w.xi_nodes.iter().enumerate() {
                    out.push_str(&io::fmt(x));
                    out.push(',');
                    out.push_str(&io::fmt(xi));
                    out.push(',');
                    out.push_str(&io::fmt(w.value(ix, iq)));
                    out.push_str(",0.00000000000000000e0\n");
                }
            }
            io::write_atomic(output, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_experiment(cli: &Cli, target: &str) -> phasegrid::Result<ExitCode> {
    let mut exp = if Path::new(target).exists() {
        let text = std::fs::read_to_string(target)?;
        RunConfig::from_json(&text)?.prepare()?
    } else {
        match find_experiment(target) {
            Some(e) => e,
            None => {
                eprintln!("unknown experiment {target:?}; registered experiments:");
                for e in registry() {
                    eprintln!("  {}", e.name);
                }
                return Ok(ExitCode::from(1));
            }
        }
    };
    if let Some(tol) = cli.tol {
        exp.tol = tol;
    }
    let report = run_experiment(&exp)?;

    std::fs::create_dir_all(&cli.out)?;
    let csv_path = cli.out.join(format!("{}.csv", report.name));
    io::write_atomic(&csv_path, &report_csv(&report))?;
    let json_path = cli.out.join(format!("{}.json", report.name));
    io::write_atomic(&json_path, &report_summary(&report, cli.seed)?)?;

    println!(
        "{}: {} (final error {:.6e}, tol {:.1e})",
        report.name,
        report.verdict,
        report.errors.last().map(|e| e.1).unwrap_or(f64::NAN),
        report.tol
    );
    if let Some(gap) = report.naive_final_error {
        println!("  naive-formula error at largest k: {gap:.6e} (strict gap)");
        for (k, e) in &report.errors {
            println!("  k={k:4}  corrected error {e:.6e}");
        }
    }
    println!("  report: {}", csv_path.display());
    println!("  summary: {}", json_path.display());

    Ok(if report.verdict == Verdict::Converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn report_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from("k,h,eps,value_re,value_im,predicted,abs_err\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            io::fmt(r.h),
            io::fmt(r.eps),
            io::fmt(r.value_re),
            io::fmt(r.value_im),
            io::fmt(r.predicted),
            io::fmt(r.abs_err),
        ));
    }
    out
}

fn report_summary(report: &ConvergenceReport, seed: Option<u64>) -> phasegrid::Result<String> {
    let errors: Vec<serde_json::Value> = report
        .errors
        .iter()
        .map(|(k, e)| serde_json::json!({"k": k, "abs_err": e}))
        .collect();
    let summary = serde_json::json!({
        "name": report.name,
        "verdict": report.verdict.to_string(),
        "tol": report.tol,
        "final_error": report.errors.last().map(|e| e.1),
        "errors": errors,
        "naive_final_error": report.naive_final_error,
        "gate": report.gate.map(|g| format!("{g:?}")),
        "window_margins": report.window_margins,
        "seed": seed,
    });
    serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Io(format!("summary serialization: {e}")))
}
