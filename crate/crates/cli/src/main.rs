//! `qtrace`: classify and certify positive twisted traces from a JSON
//! problem configuration.
//!
//! Exit codes: 0 success (feasible and certified, or all residuals within
//! tolerance), 2 inconclusive or a residual out of tolerance, 3 certified
//! infeasible, 1 bad input.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qtrace_core::positivity::CircleFunction;

use crate::commands::{cmd_classify, cmd_emit_circle, cmd_moments, cmd_verify, write_output};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "qtrace", version, about = "Positive twisted traces on generalized q-Weyl algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the trace, run every oracle and certificate, print the report.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Random pairs for the twisted-trace oracle.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Moment table as CSV (i,re,im,abs), or JSON when --out ends in .json.
    Moments {
        #[command(flatten)]
        common: Common,
        /// Largest |i| to tabulate; defaults to W.
        #[arg(long)]
        max_index: Option<i64>,
    },
    /// Twisted-trace, linear-system and functional-equation residuals.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Samples of w or z^k P(z) w(qz) on the unit circle as CSV (phi,re,im).
    EmitCircle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "w")]
        function: CircleFunction,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QTRACE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Threads(raw.clone()))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    init_threads()?;
    let common = match &cli.command {
        Command::Classify { common, .. }
        | Command::Moments { common, .. }
        | Command::Verify { common, .. }
        | Command::EmitCircle { common, .. } => common,
    };
    let mut cfg = config::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.opts.seed = seed;
    }
    let out = common.out.as_deref();
    let outcome = match &cli.command {
        Command::Classify { trials, .. } => {
            if let Some(t) = trials {
                cfg.opts.trials = *t;
            }
            cmd_classify(&cfg)?
        }
        Command::Moments { max_index, .. } => cmd_moments(&cfg, *max_index, out)?,
        Command::Verify { trials, .. } => cmd_verify(&cfg, trials.unwrap_or(cfg.opts.trials))?,
        Command::EmitCircle { function, .. } => cmd_emit_circle(&cfg, *function)?,
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    if !outcome.body.is_empty() {
        write_output(out, &outcome.body)?;
    }
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
