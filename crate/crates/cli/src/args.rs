//! Command-line surface: subcommands, their flags, and global numeric
//! overrides.

use clap::{Args, Parser, Subcommand, ValueEnum};
use iclt_core::perturbation::Method;

#[derive(Parser, Debug)]
#[command(
    name = "iclt",
    about = "Lyapunov exponent and CLT variance of a rotationally forced 2-D linear SDE",
    version
)]
pub struct Cli {
    /// Tolerance override: verification thresholds and eigenvalue
    /// convergence targets.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Starting quadrature grid size (even, at least 4).
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Cap on the Fourier series truncation order K.
    #[arg(long, global = true, value_name = "K")]
    pub series_k: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form ell and s² from drift eigenvalues (a, b) and noise σ.
    Compute(ComputeArgs),
    /// One λ(μ) eigenvalue estimate plus derivative extraction.
    Eig(EigArgs),
    /// Monte Carlo estimate of ell and s² from simulated angle paths.
    Mc(McArgs),
    /// Cross-validation battery over all computation routes.
    Verify(VerifyArgs),
    /// CSV sweep of ell(σ) and s²(σ) at fixed drift.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// Top drift eigenvalue.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Bottom drift eigenvalue (must satisfy a > b).
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Rotational noise intensity (must be positive).
    #[arg(long)]
    pub sigma: f64,
}

/// Which spectral route evaluates λ(μ).
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Leftmost eigenvalue of the truncated tridiagonal matrix.
    Matrix,
    /// Root of the continued-fraction characteristic equation.
    Cfrac,
}

impl From<Route> for Method {
    fn from(route: Route) -> Method {
        match route {
            Route::Matrix => Method::SpectralMatrix,
            Route::Cfrac => Method::SpectralCfrac,
        }
    }
}

#[derive(Args, Debug)]
pub struct EigArgs {
    /// Coefficient c of the periodic eigenvalue problem.
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    /// Perturbation parameter μ.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Eigenvalue route.
    #[arg(long, value_enum)]
    pub method: Route,
    /// Matrix dimension (matrix route only; default 40, escalated on
    /// residual failure).
    #[arg(long)]
    pub n: Option<usize>,
    /// Continued-fraction depth (cfrac route only; default 60, escalated
    /// on residual failure).
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Args, Debug)]
pub struct McArgs {
    /// Top drift eigenvalue.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Bottom drift eigenvalue (must satisfy a > b).
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Rotational noise intensity (must be positive).
    #[arg(long)]
    pub sigma: f64,
    /// Euler time step.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Time horizon per path.
    #[arg(long, default_value_t = 1e4)]
    pub time: f64,
    /// Number of independent paths.
    #[arg(long, default_value_t = 64)]
    pub paths: usize,
    /// Batch-means windows per path.
    #[arg(long, default_value_t = 32)]
    pub batches: usize,
    /// RNG seed.
    #[arg(long, default_value_t = iclt_core::mc_sim::DEFAULT_SEED)]
    pub seed: u64,
    /// Initial angle in [0, 2π).
    #[arg(long, default_value_t = 0.0)]
    pub theta0: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only the fast subset of checks.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Top drift eigenvalue.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Bottom drift eigenvalue (must satisfy a > b).
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Smallest σ in the sweep (must be positive).
    #[arg(long)]
    pub sigma_min: f64,
    /// Largest σ in the sweep (must exceed sigma-min).
    #[arg(long)]
    pub sigma_max: f64,
    /// Number of rows; 1 evaluates sigma-min alone.
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
}
