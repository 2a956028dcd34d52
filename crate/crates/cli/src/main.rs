//! `iclt`: Lyapunov exponent and CLT variance of a rotationally forced 2-D
//! linear SDE, computed by closed form, spectral truncation, or Monte Carlo.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 internal
//! numerical failure.

use clap::Parser;
use iclt::{args, commands, verify};

fn main() {
    // Thread cap must be installed before the first rayon pool use.
    // ICLT_THREADS=0 (or unset) keeps rayon's automatic sizing.
    if let Ok(raw) = std::env::var("ICLT_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                // A second global-pool install cannot happen this early;
                // ignore the error to stay idempotent anyway.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            Err(_) => {
                eprintln!("error: ICLT_THREADS must be a nonnegative integer, got {raw:?}");
                std::process::exit(2);
            }
        }
    }
    let cli = args::Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                3
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: args::Cli) -> iclt_core::Result<i32> {
    match cli.command {
        args::Command::Compute(a) => {
            let opts = commands::compute_options(cli.tol, cli.grid, cli.series_k);
            commands::cmd_compute(&a, &opts)?;
            Ok(0)
        }
        args::Command::Eig(a) => {
            commands::cmd_eig(&a, cli.tol.unwrap_or(1e-12))?;
            Ok(0)
        }
        args::Command::Mc(a) => {
            let opts = commands::compute_options(cli.tol, cli.grid, cli.series_k);
            commands::cmd_mc(&a, &opts)?;
            Ok(0)
        }
        args::Command::Sweep(a) => {
            let opts = commands::compute_options(cli.tol, cli.grid, cli.series_k);
            commands::cmd_sweep(&a, &opts)?;
            Ok(0)
        }
        args::Command::Verify(a) => {
            // --tol retargets the pass thresholds only; the computations
            // themselves always run at their standard settings so that an
            // unreachable tolerance reports FAIL instead of erroring out.
            let opts = commands::compute_options(None, cli.grid, cli.series_k);
            verify::cmd_verify(a.quick, cli.tol, &opts)
        }
    }
}
