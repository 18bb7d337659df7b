use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod report;

use config::{CommonArgs, Format, Kind, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hardy_core::Error),
    #[error("cannot write report: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_configuration() => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

/// Numerical verification of Hardy-type inequalities on model manifolds.
#[derive(Parser, Debug)]
#[command(name = "hardy-verify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every (case, model, corpus function) triple
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Residual of the critical identity over the grid
    Identity {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest accepted relative residual
        #[arg(long, default_value_t = hardy_core::catalog::IDENTITY_BOUND)]
        bound: f64,
    },
    /// Sweep an extremal family toward its sharp constant
    Sharpness {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest accepted relative gap between limit and constant
        #[arg(long, default_value_t = 0.02)]
        bound: f64,
        /// Swept parameter values, strictly decreasing
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
    /// Stability margins and the open-problem quotient
    Stability {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = Kind::Subcritical)]
        kind: Kind,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (cfg, outcome) = match cli.command {
        Command::Verify { common } => {
            let cfg = RunConfig::from_args("verify", &common)?;
            let o = commands::verify(&cfg)?;
            (cfg, o)
        }
        Command::Identity { common, bound } => {
            let mut cfg = RunConfig::from_args("identity", &common)?;
            cfg.bound = Some(bound);
            let o = commands::identity(&cfg)?;
            (cfg, o)
        }
        Command::Sharpness { common, bound, values } => {
            let mut cfg = RunConfig::from_args("sharpness", &common)?;
            cfg.bound = Some(bound);
            cfg.values = values;
            let o = commands::sharpness(&cfg)?;
            (cfg, o)
        }
        Command::Stability { common, kind } => {
            let mut cfg = RunConfig::from_args("stability", &common)?;
            cfg.kind = Some(kind);
            let o = commands::stability(&cfg)?;
            (cfg, o)
        }
    };
    let out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(File::create(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(out);
    match cfg.format {
        Format::Json => {
            let doc = report::document(&cfg, &outcome.rows)?;
            report::write_json(&mut out, &doc).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Format::Csv => report::write_csv(&mut out, &outcome.rows)?,
    }
    out.flush().map_err(|e| CliError::Io(e.to_string()))?;
    let passed = outcome.rows.iter().filter(|r| r.pass()).count();
    eprintln!("{}: {passed}/{} passed", cfg.command, outcome.rows.len());
    Ok(outcome.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
