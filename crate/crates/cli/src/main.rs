//! `hardy-lab`: runs one experiment spec and writes its reports.

mod run;
mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use spec::{ExperimentSpec, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(String),
    #[error(transparent)]
    Core(#[from] multipolar_hardy::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Spec(_) => 2,
            CliError::Core(multipolar_hardy::Error::LinearAlgebra(_)) | CliError::Io(_) => 1,
            CliError::Core(_) => 2,
        }
    }
}

/// Run a multipolar Hardy experiment described by a TOML spec file.
#[derive(Debug, Parser)]
#[command(name = "hardy-lab", version)]
struct Args {
    /// Experiment spec file.
    spec: PathBuf,
    /// Report directory (overrides `output`).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_r: Option<usize>,
    #[arg(long)]
    n_theta: Option<usize>,
    /// Comma-separated, strictly decreasing sweep values.
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k0: Option<f64>,
    /// Parse and validate the spec without running it.
    #[arg(long)]
    check: bool,
}

fn write_reports(spec: &ExperimentSpec, outcome: &run::Outcome, dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut echo = spec.clone();
    echo.output = None;
    let report = json!({
        "command": spec.command.name(),
        "passed": outcome.passed(),
        "assertions": outcome.assertions,
        "spec": echo,
        "result": outcome.result,
    });
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    std::fs::write(&path, text)?;
    for (name, contents) in &outcome.csv {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(path)
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let mut spec = ExperimentSpec::load(&args.spec)?;
    spec.apply(&Overrides {
        output: args.output.clone(),
        seed: args.seed,
        n_r: args.n_r,
        n_theta: args.n_theta,
        epsilons: args.epsilons.clone(),
        mu: args.mu,
        lambda: args.lambda,
        k0: args.k0,
    });
    spec.validate()?;
    if args.check {
        println!("{}", json!({ "command": spec.command.name(), "status": "valid" }));
        return Ok(true);
    }
    let outcome = run::run(&spec)?;
    let dir = spec.output.clone().unwrap_or_else(|| PathBuf::from("."));
    let path = write_reports(&spec, &outcome, &dir)?;
    let failed: Vec<&str> = outcome.assertions.iter().filter(|a| !a.passed).map(|a| a.name.as_str()).collect();
    let status = if failed.is_empty() { "pass" } else { "fail" };
    println!(
        "{}",
        json!({ "command": spec.command.name(), "status": status, "failed": failed, "report": path })
    );
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let code = e.exit_code();
            let status = if code == 2 { "invalid-spec" } else { "error" };
            eprintln!("hardy-lab: {e}");
            eprintln!("{}", json!({ "status": status, "error": e.to_string() }));
            ExitCode::from(code)
        }
    }
}
