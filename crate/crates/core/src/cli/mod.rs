//! The `cbridge` command-line front end.
//!
//! Exit codes: 0 when every verdict passes, 1 when a check fails, 2 on
//! configuration or domain errors.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{execute, Outcome};
pub use config::{CheckName, CommandConfig, DirectionArg, ModelEntry, RunConfig, SamplerKind, Tolerances};

use crate::error::{Error, Result};
use crate::verify::{DEFAULT_CHECK_STEP, DEFAULT_CONVEXITY_STEP};

#[derive(Debug, Parser)]
#[command(name = "cbridge", version, about = "Bridges of Markov counting processes")]
pub struct Cli {
    /// Replay a run from an emitted manifest.json.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Cmd>,
    /// Output directory when replaying a manifest.
    #[arg(long = "replay-out", default_value = "out")]
    pub replay_out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Dump Ξ(t, z) on a grid: `t,z,xi`.
    Characteristics {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.01)]
        t_step: f64,
    },
    /// Mean curve with second differences and the mean bound.
    MeanCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.01)]
        t_step: f64,
    },
    /// One-time marginals: `t,z,prob`.
    Marginals {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.01)]
        t_step: f64,
    },
    /// Sample bridge paths.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "thinning")]
        sampler: SamplerKind,
    },
    /// Run theorem checks; exit code 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "convexity,dominance,mean-bound,duality")]
        checks: Vec<CheckName>,
        #[arg(long, value_enum, default_value = "lower")]
        direction: DirectionArg,
    },
    /// Law-of-large-numbers experiment for bridges 0 → N.
    Lln {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "50,200,800")]
        n_list: Vec<u64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Model descriptor JSON; without it each --lambda gives ℓ = e^{λt}.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub x: u64,
    #[arg(long, default_value_t = 20)]
    pub y: u64,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub u: f64,
    /// Comma-separated characteristic values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    /// Table step of the h-function solver.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_margin: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_second_diff: f64,
    #[arg(long, default_value_t = 4.0)]
    pub tol_z: f64,
    /// Also write a gnuplot script next to the data.
    #[arg(long)]
    pub gnuplot: bool,
}

fn models(common: &Common, default_lambdas: &[f64]) -> Result<Vec<ModelEntry>> {
    if let Some(path) = &common.model {
        return Ok(vec![ModelEntry::from_file(path, common.lambda.first().copied())?]);
    }
    let lambdas = if common.lambda.is_empty() { default_lambdas } else { &common.lambda };
    Ok(lambdas.iter().map(|&l| ModelEntry::constant(l)).collect())
}

/// Turns parsed flags into a fully resolved configuration and the output
/// directory.
pub fn resolve(cmd: Cmd) -> Result<(RunConfig, PathBuf)> {
    let (common, command, default_lambdas, replicas): (Common, CommandConfig, &[f64], usize) = match cmd {
        Cmd::Characteristics { common, t_step } => (common, CommandConfig::Characteristics { t_step }, &[3.0], 0),
        Cmd::MeanCurve { common, t_step } => {
            (common, CommandConfig::MeanCurve { t_step }, &[-5.0, -3.0, 0.0, 3.0, 5.0], 0)
        }
        Cmd::Marginals { common, t_step } => (common, CommandConfig::Marginals { t_step }, &[3.0], 0),
        Cmd::Sample { common, sampler } => (common, CommandConfig::Sample { sampler }, &[3.0], 10_000),
        Cmd::Verify { common, checks, direction } => (
            common,
            CommandConfig::Verify { checks, direction, convexity_step: DEFAULT_CONVEXITY_STEP },
            &[3.0],
            100_000,
        ),
        Cmd::Lln { common, n_list } => (common, CommandConfig::Lln { n_list }, &[3.0], 200),
    };
    let cfg = RunConfig {
        models: models(&common, default_lambdas)?,
        command,
        x: common.x,
        y: common.y,
        s: common.s,
        u: common.u,
        h_step: common.step.unwrap_or(DEFAULT_CHECK_STEP),
        seed: common.seed,
        replicas: common.replicas.unwrap_or(replicas),
        tolerances: Tolerances { margin: common.tol_margin, second_diff: common.tol_second_diff, z: common.tol_z },
        gnuplot: common.gnuplot,
    };
    cfg.validate()?;
    Ok((cfg, common.out))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let resolved = match (cli.manifest, cli.command) {
        (Some(path), None) => std::fs::read_to_string(&path)
            .map_err(Error::from)
            .and_then(|text| RunConfig::from_json(&text))
            .map(|cfg| (cfg, cli.replay_out)),
        (None, Some(cmd)) => resolve(cmd),
        (Some(_), Some(_)) => Err(Error::InvalidInput("--manifest replaces the subcommand".into())),
        (None, None) => Err(Error::InvalidInput("a subcommand or --manifest is required".into())),
    };
    let outcome = resolved.and_then(|(cfg, out)| execute(&cfg, &out));
    match outcome {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
