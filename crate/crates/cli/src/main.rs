//! `mpas`: compute functionals, verify inequalities and study illumination
//! surface bodies from the command line.
//!
//! Exit codes: 0 success, 1 a check failed or a body was unbounded,
//! 2 invalid input.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mpas_core::GeometryError;
use serde::Deserialize;

use commands::{Outcome, Settings};
use config::{BodySpec, ComputeConfig, ExponentSpec, Format, Functional, Preset, RunConfig, VerifyConfig};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Geometry(GeometryError::UnboundedBody { .. }) | Self::Failed(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mpas", version, about = "Mixed p-affine surface areas and illumination surface bodies")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Circle nodes (n = 2), sphere level (n = 3) or Monte Carlo samples.
    #[arg(long, global = true)]
    rule_size: Option<usize>,
    /// Relative tolerance floor for inequality verdicts.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tolerance: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one functional.
    Compute {
        #[arg(long, value_enum)]
        functional: Option<Functional>,
        /// Body as an inline TOML table, e.g. '{ kind = "ball", dim = 2 }'. Repeatable.
        #[arg(long = "body")]
        bodies: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        i: Option<f64>,
    },
    /// Run the inequality suite.
    Verify {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
    /// Convergence study, membership sweep or boundary trace.
    Illuminate,
    /// Reproduce a fixed exhibit.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoName {
    /// Membership table for the weighted square.
    #[value(name = "example-3-1", alias = "weighted-square")]
    WeightedSquare,
    /// Non-convexity certificate for quadrant weights on the disk.
    NonconvexDisk,
    /// Rounded squares with vanishing p-affine surface area.
    DegenerateKre,
    /// Scaled volume differences and their limits.
    #[value(name = "theorem-4-limit", alias = "limit")]
    Limit,
}

fn parse_body(s: &str) -> Result<BodySpec, CliError> {
    #[derive(Deserialize)]
    struct Wrap {
        body: BodySpec,
    }
    toml::from_str::<Wrap>(&format!("body = {s}"))
        .map(|w| w.body)
        .map_err(|e| CliError::Input(format!("--body {s}: {e}")))
}

fn run(cli: Cli) -> Result<(Outcome, Format, Option<PathBuf>), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let settings = Settings {
        seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        rule_size: cli.rule_size.or(file.rule_size),
        tolerance: cli.tolerance.or(file.tolerance).unwrap_or(mpas_core::inequality::DEFAULT_TOLERANCE_FLOOR),
    };
    if !(settings.tolerance >= 0.0) {
        return Err(CliError::Input(format!("tolerance must be nonnegative, got {}", settings.tolerance)));
    }
    let format = cli.format.or(file.format).unwrap_or_default();
    let output = cli.output.or(file.output.map(PathBuf::from));
    let outcome = match cli.command {
        Command::Compute { functional, bodies, p, i } => {
            let mut cfg = match (file.compute, functional) {
                (Some(c), _) => c,
                (None, Some(f)) => ComputeConfig { functional: f, bodies: Vec::new(), p: None, i: None },
                (None, None) => return Err(CliError::Input("compute needs --functional or a [compute] table".into())),
            };
            if let Some(f) = functional {
                cfg.functional = f;
            }
            if !bodies.is_empty() {
                cfg.bodies = bodies.iter().map(|b| parse_body(b)).collect::<Result<_, _>>()?;
            }
            if let Some(p) = p {
                cfg.p = Some(ExponentSpec::Number(p));
            }
            if i.is_some() {
                cfg.i = i;
            }
            commands::compute(&cfg, &settings)?
        }
        Command::Verify { preset } => {
            let mut cfg = file.verify.unwrap_or_else(VerifyConfig::default);
            if let Some(p) = preset {
                cfg.preset = p;
            }
            commands::verify(&cfg, &settings)?
        }
        Command::Illuminate => {
            let cfg = file
                .illuminate
                .ok_or_else(|| CliError::Input("illuminate needs an [illuminate] table in --config".into()))?;
            commands::illuminate(&cfg, &settings)?
        }
        Command::Demo { name } => match name {
            DemoName::WeightedSquare => commands::demo_weighted_square()?,
            DemoName::NonconvexDisk => commands::demo_nonconvex_disk()?,
            DemoName::DegenerateKre => commands::demo_degenerate()?,
            DemoName::Limit => commands::demo_limit(&settings)?,
        },
    };
    Ok((outcome, format, output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(outcome, format, output)| {
        let text = outcome.table.render(format)?;
        match output {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        match outcome.failure {
            Some(reason) => Err(CliError::Failed(reason)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mpas: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
