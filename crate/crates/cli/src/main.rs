//! `symgp`: reproducible CSV experiments for heat and Matérn kernels on
//! hyperbolic space and SPD matrices.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use symgp::features::BasisMethod;
use symgp::Space;

use config::{Config, Overrides};

#[derive(Parser)]
#[command(name = "symgp", version, about = "Random spherical Fourier feature experiments on H_n and SPD(d)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel estimates against the anchor point over a grid.
    KernelEval(Common),
    /// Prior sample paths over a grid.
    SamplePrior(Common),
    /// Posterior mean, standard deviation and pathwise samples.
    GpPosterior(Common),
    /// Relative Gram-matrix error against the reference kernel versus L.
    ErrorCurve(Common),
    /// Rejection-sampler acceptance rate versus length scale.
    AcceptRate(Common),
    /// Kernel value at a fixed pair versus length scale, with the limiting kernel.
    RangeCurve(Common),
    /// Raw spectral sampler draws.
    SpectralSample(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file; defaults are used for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// h2, h3, …, spd2, spd3, …
    #[arg(long)]
    space: Option<Space>,
    /// rejection or importance
    #[arg(long)]
    method: Option<BasisMethod>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (name, common, run): (&str, &Common, fn(&Config) -> Result<output::Table>) = match &cli.command {
        Command::KernelEval(c) => ("kernel-eval", c, commands::kernel_eval),
        Command::SamplePrior(c) => ("sample-prior", c, commands::sample_prior),
        Command::GpPosterior(c) => ("gp-posterior", c, commands::gp_posterior),
        Command::ErrorCurve(c) => ("error-curve", c, commands::error_curve),
        Command::AcceptRate(c) => ("accept-rate", c, commands::accept_rate),
        Command::RangeCurve(c) => ("range-curve", c, commands::range_curve),
        Command::SpectralSample(c) => ("spectral-sample", c, commands::spectral_sample),
    };
    let overrides = Overrides { seed: common.seed, space: common.space, method: common.method };
    let cfg = Config::load(common.config.as_deref(), &overrides)?;
    let table = run(&cfg)?;
    let bytes = output::render(name, &cfg, &table)?;
    output::emit(&bytes, common.out.as_deref())
}
