//! `myopic`: run decode-forward rate sweeps from a JSON config.
//!
//! Exit status: 0 on success, 1 when the config or arguments are invalid,
//! 2 when evaluation or writing output fails.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use thiserror::Error;

use myopic_cli::config::{apply_override, validate_value, ExperimentConfig, Scenario, ValidationErrors};

#[derive(Parser)]
#[command(name = "myopic", version, about = "Achievable-rate sweeps for k-hop myopic decode-forward")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multiple-relay chain: rates, splits and efficiencies per strategy.
    Mrc(RunArgs),
    /// Multiple-access relay channel sum rates.
    Marc(RunArgs),
    /// Broadcast relay channel common rates.
    Brc(RunArgs),
    /// Two-hop rates and interference on long equally spaced chains.
    Large(RunArgs),
    /// Exact rates of a small discrete memoryless network.
    Discrete(RunArgs),
    /// Check a config and report every problem found.
    Validate(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config value, e.g. `--set mrc.power_w=20` (repeatable).
    #[arg(long = "set", value_name = "PATH=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// CSV destination; standard output when neither this nor the config names one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Worker threads (defaults to one per core).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Config(#[from] ValidationErrors),
    #[error("{0}")]
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) | Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

fn load(args: &ConfigArgs, scenario: Option<Scenario>) -> Result<ExperimentConfig, Failure> {
    let mut root = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Invalid(format!("{}: malformed JSON: {e}", path.display())))?
        }
        None => Value::Object(Default::default()),
    };
    let mut errors = Vec::new();
    for o in &args.overrides {
        if let Err(e) = apply_override(&mut root, o) {
            errors.push(e);
        }
    }
    if !errors.is_empty() {
        return Err(ValidationErrors(errors).into());
    }
    let cfg = validate_value(&root, scenario)?;
    for note in &cfg.notes {
        eprintln!("note: {note}");
    }
    Ok(cfg)
}

fn write(path: &PathBuf, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn execute(scenario: Scenario, args: &RunArgs) -> Result<(), Failure> {
    let cfg = load(&args.config, Some(scenario))?;
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(Failure::Invalid("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Runtime(format!("thread pool: {e}")))?;
    }
    let svg_path = args.svg.clone().or_else(|| cfg.output.svg.clone());
    if svg_path.is_some() && cfg.sweep.is_none() {
        return Err(Failure::Invalid("--svg needs a sweep in the config".into()));
    }
    let table = myopic_cli::run_experiment(&cfg).map_err(|e| match e {
        myopic_df::Error::Invalid(m) => Failure::Invalid(m),
        other => Failure::Runtime(other.to_string()),
    })?;
    let csv = table.to_csv();
    match args.out.clone().or_else(|| cfg.output.csv.clone()) {
        Some(path) => write(&path, &csv)?,
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| Failure::Runtime(format!("stdout: {e}")))?,
    }
    if let Some(path) = svg_path {
        write(&path, &table.to_svg())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Mrc(a) => execute(Scenario::Mrc, a),
        Command::Marc(a) => execute(Scenario::Marc, a),
        Command::Brc(a) => execute(Scenario::Brc, a),
        Command::Large(a) => execute(Scenario::Large, a),
        Command::Discrete(a) => execute(Scenario::Discrete, a),
        Command::Validate(a) => load(a, None).map(|cfg| {
            let points = cfg.sweep.as_ref().map_or(1, |s| s.steps);
            println!(
                "ok: {} scenario, {} strategies, {points} sweep points",
                cfg.scenario,
                cfg.strategies.len()
            );
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            for line in e.to_string().lines() {
                eprintln!("error: {line}");
            }
            ExitCode::from(e.code())
        }
    }
}
