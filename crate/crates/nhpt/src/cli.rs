//! Argument parsing and dispatch for the `nhpt` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use nhpt_core::dynamics::IntegrationConfig;

use crate::commands;
use crate::config::{ConfigFile, RunConfig, SystemSource};
use crate::pulse_spec::PulseSpec;

/// Exit code for runs that completed but whose checks failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for invalid input or numerical failure.
pub const EXIT_ERROR: i32 = 2;

pub const DEFAULT_OUT: &str = "out";

#[derive(Parser, Debug)]
#[command(name = "nhpt", version, about = "Non-Hermitian time-dependent perturbations: simulation, spectra and theorem checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate one system from a basis state and write trajectories.
    Simulate(SimulateArgs),
    /// Rerun a reference panel (fig1a .. fig5b) or all of them.
    Reproduce(ReproduceArgs),
    /// Sampled and closed-form pulse spectra with one-sidedness leakage.
    Spectrum(SpectrumArgs),
    /// First-order and numeric transition matrices.
    TransitionMatrix(TransitionArgs),
    /// Randomized theorem suites; exits nonzero when an assertion fails.
    Verify(VerifyArgs),
    /// Vary one pulse parameter and summarize each run.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct SystemArgs {
    /// Builtin system: ep2 or ep3.
    #[arg(long)]
    pub system: Option<String>,
    /// H0 operator file (Hermitian).
    #[arg(long)]
    pub h0: Option<PathBuf>,
    /// H1 operator file.
    #[arg(long)]
    pub h1: Option<PathBuf>,
    /// Pulse such as pole:A=1,tp=0.5, modpole:A=1,tp=0.5,Omega=2, gauss:A=1,sigma=0.5 or none.
    #[arg(long, allow_hyphen_values = true)]
    pub pulse: Option<String>,
    /// Initial level, counted from 1 in ascending energy.
    #[arg(long)]
    pub init: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct IntegrationArgs {
    /// Half-width of the integration window.
    #[arg(long = "t-max", alias = "tmax")]
    pub t_max: Option<f64>,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
    #[arg(long = "max-step")]
    pub max_step: Option<f64>,
    /// Trajectory samples written per run.
    #[arg(long)]
    pub points: Option<usize>,
    /// Integrate the bare window without the analytic tails.
    #[arg(long = "no-tails")]
    pub no_tails: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Flat key = value config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Double the window until final populations settle.
    #[arg(long)]
    pub converge: bool,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Panel id such as fig1b, or `all`.
    pub figure: String,
    /// Output directory; each panel writes to its own subdirectory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub pulse: Option<String>,
    /// Half-width of the sampled window.
    #[arg(long = "tmax", alias = "t-max")]
    pub t_max: Option<f64>,
    /// Number of samples, a power of two.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Only frequencies with |w| up to this are written.
    #[arg(long = "omega-max")]
    pub omega_max: Option<f64>,
    /// Add the exact contribution from outside the window.
    #[arg(long)]
    pub tails: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct TransitionArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// numeric, first-order or both.
    #[arg(long)]
    pub method: Option<String>,
    /// Factor applied to the pulse amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// unidirectional, transitionless, symmetry or all.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trials per family.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long = "min-dim")]
    pub min_dim: Option<usize>,
    #[arg(long = "max-dim")]
    pub max_dim: Option<usize>,
    /// Half-width of the integration window.
    #[arg(long = "t-max", alias = "tmax")]
    pub t_max: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// A, tp or Omega.
    #[arg(long)]
    pub param: Option<String>,
    /// start:stop:step, stop included.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Double the window until final populations settle.
    #[arg(long)]
    pub converge: bool,
}

/// Integration settings from flags, then the config file, then defaults.
pub fn resolve_integration(a: &IntegrationArgs, file: &ConfigFile) -> Result<IntegrationConfig> {
    let d = IntegrationConfig::default();
    let t_max = file.pick(a.t_max, "t_max")?.unwrap_or(d.t_end);
    let tails = !a.no_tails && file.pick::<bool>(None, "tails")?.unwrap_or(true);
    let cfg = IntegrationConfig {
        rel_tol: file.pick(a.rel_tol, "rel_tol")?.unwrap_or(d.rel_tol),
        abs_tol: file.pick(a.abs_tol, "abs_tol")?.unwrap_or(d.abs_tol),
        max_step: file.pick(a.max_step, "max_step")?.unwrap_or(d.max_step),
        output_points: file.pick(a.points, "points")?.unwrap_or(d.output_points),
        tail_correction: tails,
        ..d.with_window(t_max)
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn resolve_system(a: &SystemArgs, file: &ConfigFile) -> Result<SystemSource> {
    SystemSource::resolve(
        file.pick(a.system.clone(), "system")?,
        file.pick_path(a.h0.clone(), "h0")?,
        file.pick_path(a.h1.clone(), "h1")?,
    )
}

pub fn resolve_pulse(raw: Option<String>, file: &ConfigFile) -> Result<PulseSpec> {
    let s = file
        .pick(raw, "pulse")?
        .context("no pulse given; use --pulse (for example pole:A=1,tp=0.5 or none)")?;
    s.parse()
}

pub fn resolve_out(common: &CommonArgs, file: &ConfigFile) -> Result<PathBuf> {
    Ok(file.pick_path(common.out.clone(), "out")?.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)))
}

pub fn resolve_run(
    system: &SystemArgs,
    integration: &IntegrationArgs,
    common: &CommonArgs,
    converge: bool,
    file: &ConfigFile,
) -> Result<RunConfig> {
    Ok(RunConfig {
        system: resolve_system(system, file)?,
        pulse: resolve_pulse(system.pulse.clone(), file)?,
        init: file.pick(system.init, "init")?.unwrap_or(1),
        integration: resolve_integration(integration, file)?,
        out: resolve_out(common, file)?,
        converge: file.flag(converge, "converge")?,
    })
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Human-readable output goes to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a, out),
        Command::Reproduce(a) => commands::reproduce(&a, out),
        Command::Spectrum(a) => commands::spectrum(&a, out),
        Command::TransitionMatrix(a) => commands::transition_matrix(&a, out),
        Command::Verify(a) => commands::verify(&a, out),
        Command::Sweep(a) => commands::sweep(&a, out),
    }
}

/// Entry point used by the binary: prints errors and maps them to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(args, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            let _ = lock.flush();
            if let Some(clap_err) = e.downcast_ref::<clap::Error>() {
                let _ = clap_err.print();
                return if clap_err.use_stderr() { EXIT_ERROR } else { 0 };
            }
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
