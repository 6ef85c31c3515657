//! Command-line front end for `helmscat-core`: JSON configs in, reports,
//! CSV tables and binary field files out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod config;
pub mod error;
pub mod fieldio;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::output::OutputDir;

#[derive(Debug, Parser)]
#[command(
    name = "helmscat",
    version,
    about = "Nonlinear Helmholtz scattering experiments"
)]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(
        long,
        global = true,
        env = "HELMSCAT_OUT",
        default_value = "helmscat-out"
    )]
    pub out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 lets rayon decide).
    #[arg(long, global = true, env = "HELMSCAT_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the fixed-point problem by damped Picard iteration.
    Solve,
    /// Follow the branch `λ ↦ u_λ` for `λ Q` from 0 to `lambda_max`.
    Continue,
    /// Estimate `κ_α` and, with a nonlinearity, the contraction product.
    Kappa,
    /// Far-field amplitude of the scattered field.
    Farfield,
    /// Numerical checks of the analytic inequalities.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Tabulated constants.
    Constants {
        #[command(subcommand)]
        which: ConstantsCommand,
    },
    /// Time-harmonic frames `Re(e^{−ikt} u)` on a slice.
    Animate {
        /// Field file to animate instead of solving from the configuration.
        #[arg(long)]
        field: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Consecutive Bessel arch areas.
    Sturm,
    /// Sign of the Fourier transform of the truncated kernel.
    Fourier,
    /// Flux of `Im(ū ∂_r u)` through spheres.
    Energy {
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Integral bounds for defocusing power nonlinearities.
    Defocusing,
}

#[derive(Debug, Subcommand)]
pub enum ConstantsCommand {
    /// First positive zero of `Y_{(N−2)/2}`.
    Zn {
        #[arg(long)]
        dim: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Continue => "continue",
            Command::Kappa => "kappa",
            Command::Farfield => "farfield",
            Command::Verify { check } => match check {
                VerifyCommand::Sturm => "verify sturm",
                VerifyCommand::Fourier => "verify fourier",
                VerifyCommand::Energy { .. } => "verify energy",
                VerifyCommand::Defocusing => "verify defocusing",
            },
            Command::Constants { .. } => "constants",
            Command::Animate { .. } => "animate",
        }
    }
}

/// Runs one command and returns the process exit code. A manifest is written
/// whenever the output directory could be created.
pub fn run(cli: Cli) -> u8 {
    if cli.threads > 0 {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let mut out = match OutputDir::create(&cli.out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return exit::INTERNAL;
        }
    };
    let loaded = match &cli.config {
        Some(path) => RunConfig::load(path).map(|(cfg, bytes)| {
            out.record_input("config", &bytes);
            cfg
        }),
        None => Ok(RunConfig::default()),
    };
    let (cfg, result) = match loaded {
        Ok(mut cfg) => {
            if cli.seed.is_some() {
                cfg.seed = cli.seed;
            }
            let r = actions::dispatch(&cli.command, &cfg, &mut out);
            (Some(cfg), r)
        }
        Err(e) => (None, Err(e)),
    };
    let (status, code, message) = match &result {
        Ok(()) => ("ok", exit::OK, None),
        Err(e) => (e.status(), e.code(), Some(format!("{e:#}"))),
    };
    if let Some(m) = &message {
        eprintln!("error: {m}");
    }
    let echo = cfg
        .as_ref()
        .and_then(|c| serde_json::to_value(c).ok())
        .unwrap_or(serde_json::Value::Null);
    let seed = cfg.as_ref().and_then(|c| c.seed);
    if let Err(e) = out.finish(cli.command.name(), echo, seed, status, code, message) {
        eprintln!("error: writing manifest: {e:#}");
        return exit::INTERNAL.max(code);
    }
    code
}

pub(crate) fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(anyhow::anyhow!("{e}"))
}
