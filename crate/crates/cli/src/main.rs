//! `homvar`: homogeneity checks, Euler–Lagrange forms, Lepagean equivalents,
//! first-variation and action quadrature, and the seeded identity suites.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage, parse or domain error.

mod commands;
mod error;
mod problem;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Kind, Outcome};
use error::CliError;
use problem::Problem;

#[derive(Parser)]
#[command(name = "homvar", version, about = "Homogeneous first-order variational problems on velocity manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Quadrature intervals per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Pass tolerance for numeric checks.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Also write the JSON report to this path (`-` for stdout).
    #[arg(long, global = true)]
    json: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Symbolic and finite homogeneity check of the Lagrangian.
    Check { problem: String },
    /// Euler–Lagrange coefficients, evaluated along the file's curves.
    Euler {
        problem: String,
        #[arg(long)]
        curve: Option<String>,
    },
    /// A Lepagean equivalent with its verification residuals.
    Equivalents {
        problem: String,
        #[arg(long, value_enum, default_value = "hilbert")]
        kind: Kind,
    },
    /// Run a seeded identity suite (`all` runs every suite).
    Verify {
        suite: String,
        /// Random instances per family.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// First-variation identity along a curve for a variation field.
    FirstVariation {
        problem: String,
        #[arg(long)]
        curve: Option<String>,
        #[arg(long)]
        field: Option<String>,
    },
    /// Action integral along a curve.
    Action {
        problem: String,
        #[arg(long)]
        curve: Option<String>,
        /// Compare with the action after the smoothstep reparametrization.
        #[arg(long)]
        reparam: bool,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = |p: Option<&Problem>| cli.seed.or(p.and_then(|p| p.options.seed)).unwrap_or(0);
    match &cli.command {
        Command::Check { problem } => {
            let p = Problem::load(problem)?;
            commands::check(&p, seed(Some(&p)))
        }
        Command::Euler { problem, curve } => commands::euler(&Problem::load(problem)?, curve.as_deref()),
        Command::Equivalents { problem, kind } => {
            let p = Problem::load(problem)?;
            commands::equivalents(&p, *kind, seed(Some(&p)))
        }
        Command::Verify { suite, trials } => commands::verify(suite, seed(None), *trials),
        Command::FirstVariation { problem, curve, field } => {
            let p = Problem::load(problem)?;
            commands::first_variation_cmd(&p, curve.as_deref(), field.as_deref(), cli.grid, cli.tol)
        }
        Command::Action { problem, curve, reparam } => {
            let p = Problem::load(problem)?;
            commands::action_cmd(&p, curve.as_deref(), cli.grid, *reparam, cli.tol)
        }
    }
}

fn write_json(path: &str, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    if path == "-" {
        let _ = writeln!(std::io::stdout().lock(), "{text}");
        return Ok(());
    }
    std::fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.to_string(), source })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run(&cli).and_then(|o| {
        if let Some(path) = &cli.json {
            write_json(path, &o.json)?;
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            if cli.json.as_deref() != Some("-") {
                // a closed pipe (`| head`) is not an error
                let _ = std::io::stdout().lock().write_all(o.text.as_bytes());
            }
            ExitCode::from(if o.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
