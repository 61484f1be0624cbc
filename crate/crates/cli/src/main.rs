//! `wigner` — scattering amplitudes and phase times for barriers,
//! splitters, and rings, driven by line-oriented config files.
//!
//! Subcommands `barrier`, `splitter`, `ring1`, and `ring2` run one
//! parameter sweep each (from `--config FILE` or a bundled `--preset`)
//! and write a deterministic CSV; `verify` runs the built-in
//! verification suite and reports every criterion.

mod config;
mod csv;
mod presets;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{ConfigError, SystemKind};
use wigner_core::verify::{all_passed, run_all, Check, Expectation};

#[derive(Parser)]
#[command(
    name = "wigner",
    version,
    about = "Scattering amplitudes and phase times for barriers, splitters, and rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a single rectangular barrier on a line
    Barrier(RunArgs),
    /// Sweep a junction branching into arms
    Splitter(RunArgs),
    /// Sweep a one-lead (reflection-only) ring
    Ring1(RunArgs),
    /// Sweep a two-lead ring
    Ring2(RunArgs),
    /// Run the built-in verification suite
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// Path to an experiment config file
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a bundled preset (fig2 ... fig13)
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Override one config entry: section.key=value (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write the CSV here, overriding the config's [output] file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(#[from] run::RunError),
    #[error("cannot read `{path}`: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write `{path}`: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("unknown preset `{name}` (available: {available})")]
    UnknownPreset { name: String, available: String },
    #[error("pass exactly one of --config or --preset")]
    NoSource,
    #[error("this config describes a `{found}` system; run it with the `{found}` subcommand")]
    KindMismatch { found: SystemKind },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify => run_verify(),
        Command::Barrier(args) => run_subcommand(SystemKind::Barrier, &args),
        Command::Splitter(args) => run_subcommand(SystemKind::Splitter, &args),
        Command::Ring1(args) => run_subcommand(SystemKind::Ring1, &args),
        Command::Ring2(args) => run_subcommand(SystemKind::Ring2, &args),
    };
    ExitCode::from(code)
}

fn run_subcommand(kind: SystemKind, args: &RunArgs) -> u8 {
    match execute(kind, args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(kind: SystemKind, args: &RunArgs) -> Result<(), CliError> {
    let text = match (&args.config, &args.preset) {
        (Some(path), None) => std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.display().to_string(),
            source,
        })?,
        (None, Some(name)) => presets::lookup(name)
            .ok_or_else(|| CliError::UnknownPreset {
                name: name.clone(),
                available: presets::names().join(", "),
            })?
            .to_string(),
        _ => return Err(CliError::NoSource),
    };
    let overrides = args
        .set
        .iter()
        .map(|s| config::parse_set_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = config::parse_config_with_overrides(&text, &overrides)?;
    if cfg.kind() != kind {
        return Err(CliError::KindMismatch { found: cfg.kind() });
    }
    let rendered = run::execute(&cfg)?.render();
    let destination = args
        .out
        .clone()
        .or_else(|| cfg.output_file.as_ref().map(PathBuf::from));
    match destination {
        Some(path) => std::fs::write(&path, rendered).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        })?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn describe(check: &Check) -> String {
    match check.expectation {
        Expectation::Within { target, tol } => {
            format!("measured {}, target {target}, tolerance {tol}", check.measured)
        }
        Expectation::Below { bound } => {
            format!("measured {}, target at most {bound}", check.measured)
        }
        Expectation::Above { bound } => {
            format!("measured {}, target above {bound}", check.measured)
        }
    }
}

fn run_verify() -> u8 {
    let results = run_all();
    for criterion in &results {
        println!("criterion {:2}: {}", criterion.number, criterion.name);
        for check in &criterion.checks {
            let verdict = if check.passed() { "PASS" } else { "FAIL" };
            println!("  [{verdict}] {}", check.label);
            println!("         {}", describe(check));
        }
        let verdict = if criterion.passed() { "PASS" } else { "FAIL" };
        println!("  criterion {} result: {verdict}", criterion.number);
    }
    let ok = all_passed(&results);
    let passed = results.iter().filter(|c| c.passed()).count();
    println!(
        "overall: {} ({passed} of {} criteria)",
        if ok { "PASS" } else { "FAIL" },
        results.len()
    );
    u8::from(!ok)
}
