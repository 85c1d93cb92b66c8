use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sdnse",
    version,
    about = "SD^p norms, embedding checks and Navier-Stokes dissipativity monitors"
)]
pub struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "SDNSE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test-function diagnostics.
    Testfns {
        #[command(subcommand)]
        action: TestfnsAction,
    },
    /// Truncated SD^p norm of a field CSV.
    Sdnorm(SdnormArgs),
    /// Run a verification suite over a generator corpus.
    Verify(VerifyArgs),
    /// Navier-Stokes solver.
    Nse {
        #[command(subcommand)]
        action: NseAction,
    },
    /// Dissipativity, contraction, energy and decay report for a trajectory.
    Monitor(MonitorArgs),
    /// Solve, monitor and verify from one config.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Subcommand)]
pub enum TestfnsAction {
    /// Sample ξ_l along one axis of cube k as CSV `x,re_xi,im_xi`.
    Dump(DumpArgs),
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    /// Jones level l.
    #[arg(long)]
    pub level: u32,
    /// Cube index k; its rational center is used.
    #[arg(long)]
    pub cube: u64,
    /// Number of sample points across the cube.
    #[arg(long)]
    pub grid: usize,
    /// Ambient dimension n (sets the 1/n normalization).
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SdnormArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Exponent p in [1, inf]; `inf` for the sup norm.
    #[arg(long, default_value = "2")]
    pub p: String,
    /// Number of functionals summed.
    #[arg(long = "K", default_value_t = 200)]
    pub k_max: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    Embeddings,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum NseAction {
    /// Integrate from the config and write series, checkpoints and manifest.
    Run(NseRunArgs),
}

#[derive(Debug, Args)]
pub struct NseRunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L2,
    Sd2,
}

#[derive(Debug, Args, Clone)]
pub struct MonitorArgs {
    /// Directory written by `nse run`.
    #[arg(long)]
    pub trajectory: PathBuf,
    /// Viscosity (default: from the run config).
    #[arg(long)]
    pub nu: Option<f64>,
    /// SD² truncation.
    #[arg(long = "K", default_value_t = 60)]
    pub k_max: u64,
    #[arg(long, value_enum, default_value = "sd2")]
    pub norm: NormArg,
    /// Relative size of the perturbed initial field for the contraction pair.
    #[arg(long, default_value_t = 1e-2)]
    pub perturbation: f64,
    /// Skip the contraction pair run.
    #[arg(long)]
    pub no_contraction: bool,
    /// Use this M instead of estimating it from the trajectory.
    #[arg(long)]
    pub m_hat: Option<f64>,
    /// Start of the decay-fit window (default: T/2).
    #[arg(long)]
    pub fit_from: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: `out` key of the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
