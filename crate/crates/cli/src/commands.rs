//! Subcommand implementations. Each computes first and prints one record
//! (or one CSV table) to stdout only after everything has succeeded.

use crate::args::{ComputeArgs, EigArgs, McArgs, SweepArgs};
use crate::record::{format_float, Record};
use iclt_core::mc_sim::{simulate, McConfig};
use iclt_core::perturbation::{
    compute_clt_with, ince_coefficient, lambda_double_prime_zero, lambda_prime_zero,
    ComputeOptions, Method, SdeParams,
};
use iclt_core::spectral::{derivatives_by_differencing, estimate_lambda, estimate_lambda_at};
use iclt_core::{Error, Result};

/// Folds the global CLI overrides into the closed-form pipeline options.
pub fn compute_options(
    tol: Option<f64>,
    grid: Option<usize>,
    series_k: Option<usize>,
) -> ComputeOptions {
    let mut opts = ComputeOptions::default();
    if let Some(t) = tol {
        opts.rel_tol = t;
    }
    if let Some(g) = grid {
        opts.grid_start = g;
    }
    if let Some(k) = series_k {
        opts.series_k_cap = k;
    }
    opts
}

/// `compute`: closed-form ell and s² with the eigenvalue derivatives.
pub fn cmd_compute(args: &ComputeArgs, opts: &ComputeOptions) -> Result<()> {
    let p = SdeParams::new(args.a, args.b, args.sigma)?;
    let result = compute_clt_with(&p, opts)?;
    let mut r = Record::with_schema();
    r.push_raw("command", "compute");
    r.push_float("a", args.a);
    r.push_float("b", args.b);
    r.push_float("sigma", args.sigma);
    r.push_raw("method", result.method.to_string());
    r.push_float("c", ince_coefficient(&p));
    r.push_float("ell", result.ell);
    r.push_float("s2", result.s2);
    r.push_float("lambda1", result.lambda1);
    r.push_float("lambda2", result.lambda2);
    r.push_int("series_k", result.diagnostics.k as u64);
    r.push_int("grid_m", result.diagnostics.m as u64);
    r.push_float("series_tail", result.diagnostics.tail);
    println!("{}", r.to_line());
    Ok(())
}

/// `eig`: one λ(μ) estimate plus finite-difference derivative extraction
/// and its deviation from the closed forms.
pub fn cmd_eig(args: &EigArgs, tol: f64) -> Result<()> {
    let method: Method = args.method.into();
    let estimate = match (method, args.n, args.depth) {
        (Method::SpectralMatrix, Some(_), Some(_)) | (Method::SpectralCfrac, Some(_), Some(_)) => {
            return Err(Error::InvalidParameter(
                "pass at most one of --n and --depth".into(),
            ));
        }
        (Method::SpectralMatrix, Some(n), None) => {
            estimate_lambda_at(args.c, args.mu, method, n, tol)?
        }
        (Method::SpectralCfrac, None, Some(d)) => {
            estimate_lambda_at(args.c, args.mu, method, d, tol)?
        }
        (Method::SpectralMatrix, None, Some(_)) => {
            return Err(Error::InvalidParameter(
                "--depth applies to the cfrac route; use --n with matrix".into(),
            ));
        }
        (Method::SpectralCfrac, Some(_), None) => {
            return Err(Error::InvalidParameter(
                "--n applies to the matrix route; use --depth with cfrac".into(),
            ));
        }
        _ => estimate_lambda(args.c, args.mu, method, tol)?,
    };
    // Derivatives need a usable step; fall back to the default when μ
    // itself is zero or too large to difference with.
    let fd_step = if args.mu != 0.0 && args.mu.abs() <= 0.1 {
        args.mu
    } else {
        1e-4
    };
    let der = derivatives_by_differencing(args.c, fd_step, method)?;
    let closed1 = lambda_prime_zero(args.c)?;
    let closed2 = lambda_double_prime_zero(args.c)?;
    let mut r = Record::with_schema();
    r.push_raw("command", "eig");
    r.push_float("c", args.c);
    r.push_float("mu", args.mu);
    r.push_raw("method", method.to_string());
    r.push_int("truncation", estimate.truncation as u64);
    r.push_float("lambda", estimate.lambda);
    r.push_float("residual", estimate.residual);
    r.push_float("fd_step", der.step);
    r.push_float("lambda1", der.lambda1);
    r.push_float("lambda2", der.lambda2);
    r.push_float("lambda1_one_sided", der.lambda1_one_sided);
    r.push_float("lambda2_one_sided", der.lambda2_one_sided);
    r.push_float("dev1", der.lambda1 - closed1);
    r.push_float("dev2", der.lambda2 - closed2);
    println!("{}", r.to_line());
    Ok(())
}

/// `mc`: Monte Carlo estimate with z-scores against the closed form.
pub fn cmd_mc(args: &McArgs, opts: &ComputeOptions) -> Result<()> {
    let p = SdeParams::new(args.a, args.b, args.sigma)?;
    let cfg = McConfig {
        dt: args.dt,
        total_time: args.time,
        n_paths: args.paths,
        n_batches: args.batches,
        seed: args.seed,
        theta0: args.theta0,
    };
    let est = simulate(&p, &cfg)?;
    let reference = compute_clt_with(&p, opts)?;
    let mut r = Record::with_schema();
    r.push_raw("command", "mc");
    r.push_float("a", args.a);
    r.push_float("b", args.b);
    r.push_float("sigma", args.sigma);
    r.push_float("dt", cfg.dt);
    r.push_float("total_time", cfg.total_time);
    r.push_int("n_paths", cfg.n_paths as u64);
    r.push_int("n_batches", cfg.n_batches as u64);
    r.push_int("seed", cfg.seed);
    r.push_float("theta0", cfg.theta0);
    r.push_int("steps_per_path", est.steps_per_path as u64);
    r.push_int("batch_len", est.batch_len as u64);
    r.push_float("t_eff", est.t_eff);
    r.push_float("ell_hat", est.ell_hat);
    r.push_float("ell_se", est.ell_se);
    r.push_float("s2_hat", est.s2_hat);
    r.push_float("s2_se", est.s2_se);
    r.push_float("ell_ref", reference.ell);
    r.push_float("s2_ref", reference.s2);
    r.push_float("z_ell", (est.ell_hat - reference.ell) / est.ell_se);
    r.push_float("z_s2", (est.s2_hat - reference.s2) / est.s2_se);
    println!("{}", r.to_line());
    Ok(())
}

/// `sweep`: CSV rows of (σ, c, ell, s², λ'(0), λ''(0)) over a σ grid.
pub fn cmd_sweep(args: &SweepArgs, opts: &ComputeOptions) -> Result<()> {
    if !(args.sigma_min > 0.0) || !args.sigma_min.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma-min must be positive, got {}",
            args.sigma_min
        )));
    }
    if !(args.sigma_min < args.sigma_max) || !args.sigma_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma-min must be below sigma-max, got {} >= {}",
            args.sigma_min, args.sigma_max
        )));
    }
    if args.steps < 1 {
        return Err(Error::InvalidParameter(
            "steps must be at least 1".into(),
        ));
    }
    let sigmas: Vec<f64> = if args.steps == 1 {
        vec![args.sigma_min]
    } else {
        (0..args.steps)
            .map(|i| {
                args.sigma_min
                    + (args.sigma_max - args.sigma_min) * i as f64 / (args.steps - 1) as f64
            })
            .collect()
    };
    // Compute every row before emitting anything, so a failure mid-grid
    // cannot leave a truncated table on stdout.
    let mut rows = Vec::with_capacity(sigmas.len());
    for sigma in sigmas {
        let p = SdeParams::new(args.a, args.b, sigma)?;
        let result = compute_clt_with(&p, opts)?;
        rows.push(format!(
            "{},{},{},{},{},{}",
            format_float(sigma),
            format_float(ince_coefficient(&p)),
            format_float(result.ell),
            format_float(result.s2),
            format_float(result.lambda1),
            format_float(result.lambda2)
        ));
    }
    println!("sigma,c,ell,s2,lambda1,lambda2");
    for row in rows {
        println!("{row}");
    }
    Ok(())
}
