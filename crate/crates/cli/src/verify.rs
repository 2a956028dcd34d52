//! The `verify` battery: recomputes the cross-route invariants, prints one
//! pass/fail row per check, and reports an overall verdict.

use iclt_core::perturbation::{
    compute_clt_with, eigenfunction_correction_with, lambda_double_prime_zero_with,
    lambda_prime_zero, lambda_prime_zero_integral, reference, ComputeOptions, Method, SdeParams,
};
use iclt_core::quadrature::{integrate_samples, PeriodicGrid};
use iclt_core::spectral::{derivatives_by_differencing, estimate_lambda, estimate_lambda_at};
use iclt_core::Result;

/// One battery row: a named worst-case deviation and its pass threshold.
struct Check {
    name: &'static str,
    delta: f64,
    tol: f64,
}

fn check(checks: &mut Vec<Check>, name: &'static str, delta: f64, tol: f64) {
    checks.push(Check { name, delta, tol });
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Fast subset: closed-form benchmarks, the two λ'(0) forms, structural
/// invariances, the boundary condition of the correction, and s² >= 0.
fn collect_quick(checks: &mut Vec<Check>, opts: &ComputeOptions) -> Result<()> {
    let strong = compute_clt_with(&SdeParams::new(1.0, -2.0, 10.0)?, opts)?;
    check(
        checks,
        "benchmark_strong_noise",
        rel_err(strong.ell, reference::ELL_STRONG_NOISE)
            .max(rel_err(strong.s2, reference::S2_STRONG_NOISE)),
        1e-12,
    );
    let weak = compute_clt_with(&SdeParams::new(1.0, -2.0, 1.0)?, opts)?;
    check(
        checks,
        "benchmark_weak_noise",
        rel_err(weak.ell, reference::ELL_WEAK_NOISE)
            .max(rel_err(weak.s2, reference::S2_WEAK_NOISE)),
        1e-12,
    );

    let mut worst = 0.0_f64;
    for &c in &[-0.01, -0.03, -1.0, -3.0, -10.0] {
        let bessel = lambda_prime_zero(c)?;
        let integral = lambda_prime_zero_integral(c)?;
        worst = worst.max((bessel - integral).abs() / bessel.abs());
    }
    check(checks, "lambda_prime_two_forms", worst, 1e-12);

    // Shifting (a, b) by a common h moves ell by exactly h and touches
    // nothing else, because c and hence both derivatives are unchanged.
    let shifted = compute_clt_with(&SdeParams::new(1.5, -1.5, 10.0)?, opts)?;
    let shift_delta = ((shifted.ell - strong.ell) - 0.5)
        .abs()
        .max((shifted.s2 - strong.s2).abs())
        .max((shifted.lambda1 - strong.lambda1).abs())
        .max((shifted.lambda2 - strong.lambda2).abs());
    check(checks, "shift_equivariance", shift_delta, 1e-12);

    // Speeding time up by κ maps (a, b, σ) to (κa, κb, √κ σ) and must
    // scale both ell and s² by κ.
    let base = compute_clt_with(&SdeParams::new(1.0, -2.0, 1.0)?, opts)?;
    let kappa = 4.0;
    let sped = compute_clt_with(&SdeParams::new(4.0, -8.0, 2.0)?, opts)?;
    check(
        checks,
        "time_rescaling",
        rel_err(sped.ell, kappa * base.ell).max(rel_err(sped.s2, kappa * base.s2)),
        1e-10,
    );

    let grid = PeriodicGrid::new(256)?;
    let correction = eigenfunction_correction_with(-3.0, &grid, opts)?;
    let boundary = correction
        .zprime_values
        .last()
        .copied()
        .unwrap_or(f64::NAN)
        .abs();
    check(checks, "correction_boundary", boundary, 1e-12);

    // s² must come out nonnegative across a broad parameter sample; the
    // delta is how far below zero the worst sample dips.
    let mut worst_negative = 0.0_f64;
    for i in 0..5 {
        for j in 0..4 {
            let a = -1.0 + 1.1 * i as f64;
            let b = a - (0.5 + 0.9 * j as f64);
            let sigma = 0.4 + 2.3 * ((i + j) % 4) as f64;
            let result = compute_clt_with(&SdeParams::new(a, b, sigma)?, opts)?;
            worst_negative = worst_negative.max(-result.s2).max(0.0);
        }
    }
    check(checks, "variance_nonnegative", worst_negative, 0.0);
    Ok(())
}

/// Full-battery extras: spectral route agreement, λ(0) = 0, derivative
/// extraction accuracy, and the closure of the second-order integral.
fn collect_full(checks: &mut Vec<Check>, opts: &ComputeOptions) -> Result<()> {
    let mut worst_zero = 0.0_f64;
    for &c in &[-0.03, -3.0] {
        let matrix = estimate_lambda_at(c, 0.0, Method::SpectralMatrix, 40, 1e-12)?;
        let cfrac = estimate_lambda_at(c, 0.0, Method::SpectralCfrac, 60, 1e-12)?;
        worst_zero = worst_zero.max(matrix.lambda.abs()).max(cfrac.lambda.abs());
    }
    check(checks, "lambda_zero_both_routes", worst_zero, 1e-13);

    let mut worst_cross = 0.0_f64;
    for &c in &[-0.03, -1.0, -3.0, -10.0] {
        for &mu in &[1e-4, 1e-3, 1e-2] {
            let matrix = estimate_lambda(c, mu, Method::SpectralMatrix, 1e-12)?;
            let cfrac = estimate_lambda(c, mu, Method::SpectralCfrac, 1e-12)?;
            worst_cross = worst_cross.max((matrix.lambda - cfrac.lambda).abs());
        }
    }
    check(checks, "cross_method_agreement", worst_cross, 1e-12);

    let mut worst_central = 0.0_f64;
    let mut worst_one_sided = 0.0_f64;
    for &c in &[-0.03, -3.0] {
        let der = derivatives_by_differencing(c, 1e-4, Method::SpectralMatrix)?;
        let closed1 = lambda_prime_zero(c)?;
        let (closed2, _) = lambda_double_prime_zero_with(c, opts)?;
        worst_central = worst_central
            .max((der.lambda1 - closed1).abs())
            .max((der.lambda2 - closed2).abs());
        worst_one_sided = worst_one_sided
            .max((der.lambda1_one_sided - closed1).abs())
            .max((der.lambda2_one_sided - closed2).abs());
    }
    check(checks, "differencing_central", worst_central, 1e-8);
    check(checks, "differencing_one_sided", worst_one_sided, 1e-4);

    // Substituting λ''(0) back into the second-order equation, the full
    // weighted integral over the half period must vanish.
    let mut worst_residual = 0.0_f64;
    for &c in &[-0.03, -3.0] {
        let lambda1 = lambda_prime_zero(c)?;
        let (lambda2, _) = lambda_double_prime_zero_with(c, opts)?;
        let grid = PeriodicGrid::new(4096)?;
        let correction = eigenfunction_correction_with(c, &grid, opts)?;
        let integrand: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(&correction.z_values)
            .map(|(&t, &z)| {
                let cos2 = (2.0 * t).cos();
                (2.0 * (c * cos2 - lambda1) * z - lambda2) * (-(c / 2.0) * cos2).exp()
            })
            .collect();
        worst_residual = worst_residual.max(integrate_samples(&integrand, &grid)?.abs());
    }
    check(checks, "solvability_residual", worst_residual, 1e-11);
    Ok(())
}

/// Runs the battery and prints the table. Returns the process exit code:
/// 0 when every check passes, 1 otherwise.
pub fn cmd_verify(quick: bool, tol_override: Option<f64>, opts: &ComputeOptions) -> Result<i32> {
    let mut checks = Vec::new();
    collect_quick(&mut checks, opts)?;
    if !quick {
        collect_full(&mut checks, opts)?;
    }
    if let Some(tol) = tol_override {
        for c in &mut checks {
            c.tol = tol;
        }
    }
    let mut failed = 0usize;
    println!("{:<26} {:>13} {:>9} {:>7}", "check", "delta", "tol", "result");
    for c in &checks {
        let pass = c.delta <= c.tol;
        if !pass {
            failed += 1;
        }
        println!(
            "{:<26} {:>13.6e} {:>9.1e} {:>7}",
            c.name,
            c.delta,
            c.tol,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "verify: {} checks, {} passed, {} failed",
        checks.len(),
        checks.len() - failed,
        failed
    );
    Ok(if failed == 0 { 0 } else { 1 })
}
