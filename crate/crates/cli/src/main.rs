//! `gcarma`: B-splines, filters, sample paths and statistics from a JSON config.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use commands::SeriesKind;
use config::{RunConfig, SPEC_VERSION};

#[derive(Parser)]
#[command(name = "gcarma", version, about = "Generalized CARMA / Levy process toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of samples to generate.
    #[arg(long, global = true)]
    length: Option<usize>,
    /// Output file (stdout when omitted, except for `filters`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `bspline`: evaluation grid spacing. `generate`/`validate`: sampling step of the system.
    #[arg(long, global = true)]
    grid_step: Option<f64>,
    /// Oversampling factor for non-Gaussian stable innovations.
    #[arg(long, global = true)]
    oversample: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate beta_L and its autocorrelation on [-N, N].
    Bspline,
    /// Write d_alpha, B_L, b_L+ and q_alpha taps, plus spectra to `<out>.spectrum.csv`.
    Filters,
    /// Generate a sample path.
    Generate {
        /// Poisson knot file (default `<out>.knots.csv`).
        #[arg(long)]
        knots: Option<PathBuf>,
        /// Also write the generalized increments u[k].
        #[arg(long)]
        increments: Option<PathBuf>,
    },
    /// Autocovariance of a `k,re,im` series, against theory when a config is given.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        maxlag: Option<usize>,
        #[arg(long, value_enum, default_value = "process")]
        kind: SeriesKind,
    },
    /// Generate a path and check it against the model; exits nonzero if any check fails.
    Validate,
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig {
            spec_version: SPEC_VERSION,
            system: None,
            innovation: None,
            components: Vec::new(),
            length: None,
            seed: None,
            oversample: None,
            method: None,
            grid_step: None,
            maxlag: None,
        },
    };
    cfg.seed = cli.seed.or(cfg.seed);
    cfg.length = cli.length.or(cfg.length);
    cfg.oversample = cli.oversample.or(cfg.oversample);
    match (&cli.command, cli.grid_step) {
        (Command::Bspline, Some(h)) => cfg.grid_step = Some(h),
        (Command::Generate { .. } | Command::Validate, Some(h)) => {
            for s in cfg.system.iter_mut().chain(cfg.components.iter_mut().map(|c| &mut c.system)) {
                s.step = h;
            }
        }
        _ => {}
    }
    if let Command::Stats { maxlag: Some(m), .. } = &cli.command {
        cfg.maxlag = Some(*m);
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = effective_config(cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Bspline => commands::bspline(&cfg, out)?,
        Command::Filters => {
            let Some(out) = out else { bail!("filters needs --out") };
            commands::filters(&cfg, out)?
        }
        Command::Generate { knots, increments } => commands::generate_cmd(&cfg, out, knots.as_deref(), increments.as_deref())?,
        Command::Stats { input, kind, .. } => commands::stats(&cfg, input, *kind, out)?,
        Command::Validate => return commands::validate(&cfg, out),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("gcarma: validation failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("gcarma: {e:#}");
            ExitCode::from(2)
        }
    }
}
