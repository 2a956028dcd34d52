//! Spectral route to λ(μ): leftmost eigenvalue of the truncated
//! tridiagonal operator and, independently, the root of its
//! continued-fraction characteristic equation, plus finite-difference
//! extraction of λ'(0) and λ''(0) from either.
//!
//! The infinite operator acts on Fourier cosine coefficients with
//! r_n = 4n² on the diagonal and couplings q_n = (-n + μ/2) c, the first
//! off-diagonal pair carrying an extra √2. Its leftmost eigenvalue is the
//! analytic continuation of λ(0) = 0 in μ.

use crate::error::{Error, Result};
use crate::perturbation::Method;
use crate::specfun::bessel_i;
use nalgebra::{Complex, DMatrix};

/// N×N leading principal truncation of the tridiagonal operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalTruncation {
    c: f64,
    mu: f64,
    diag: Vec<f64>,
    sub: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalTruncation {
    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// The coefficient c the truncation was built from.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// The perturbation parameter μ the truncation was built from.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Diagonal entries r_n = 4n².
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Subdiagonal entries, sub[k] = entry (k+1, k).
    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    /// Superdiagonal entries, sup[k] = entry (k, k+1).
    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// Dense-indexed entry, zero outside the three diagonals.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.sup[i]
        } else if i == j + 1 {
            self.sub[j]
        } else {
            0.0
        }
    }

    /// Products of paired off-diagonal entries, P_k = sub[k]·sup[k].
    /// The truncation is similar to a symmetric tridiagonal matrix with
    /// off-diagonals √P_k exactly when all P_k ≥ 0.
    fn pair_products(&self) -> Vec<f64> {
        self.sub
            .iter()
            .zip(&self.sup)
            .map(|(&s, &t)| s * t)
            .collect()
    }
}

/// One (μ, λ(μ)) evaluation with its provenance and convergence data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate {
    /// Perturbation parameter the eigenvalue was evaluated at.
    pub mu: f64,
    /// The leftmost eigenvalue λ(μ).
    pub lambda: f64,
    /// Producing route (matrix or cfrac).
    pub method: Method,
    /// Matrix dimension N or continued-fraction depth D actually used.
    pub truncation: usize,
    /// Change of λ under a truncation increase (N → 2N, D → D + D/2).
    pub residual: f64,
}

/// Finite-difference derivative estimates of λ at μ = 0. The headline
/// pair (lambda1, lambda2) is the central difference with one Richardson
/// extrapolation step over the half step; the raw central and one-sided
/// variants ride along for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimates {
    /// λ'(0), Richardson-extrapolated central estimate.
    pub lambda1: f64,
    /// λ''(0), Richardson-extrapolated central estimate.
    pub lambda2: f64,
    /// Raw central λ'(0) at the full step: (λ(μ) - λ(-μ))/(2μ).
    pub lambda1_central: f64,
    /// Raw central λ''(0) at the full step: (λ(μ) + λ(-μ))/μ².
    pub lambda2_central: f64,
    /// One-sided λ'(0) = λ(μ)/μ.
    pub lambda1_one_sided: f64,
    /// One-sided λ''(0) = (λ(μ)/μ - c I_1(-c/2)/I_0(-c/2))/(μ/2).
    pub lambda2_one_sided: f64,
    /// The full finite-difference step μ.
    pub step: f64,
    /// Eigenvalue route used underneath.
    pub method: Method,
}

/// Builds the N×N truncation from c, μ. Entries follow r_n = 4n² and
/// q_n = (-n + μ/2) c, with √2 on both entries of the first off-diagonal
/// pair: row 0 is [r₀, √2 q_{-1}], row 1 starts [√2 q₀, r₁, q_{-2}], and
/// row n ≥ 2 is [q_{n-1}, r_n, q_{-(n+1)}].
pub fn build_matrix(c: f64, mu: f64, n: usize) -> Result<TridiagonalTruncation> {
    if !c.is_finite() || !mu.is_finite() {
        return Err(Error::NonFiniteArgument {
            context: "build_matrix",
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "matrix dimension must be at least 1".into(),
        ));
    }
    let q = |k: f64| (-k + mu / 2.0) * c;
    let sqrt2 = std::f64::consts::SQRT_2;
    let diag: Vec<f64> = (0..n).map(|i| 4.0 * (i * i) as f64).collect();
    let mut sub = Vec::with_capacity(n.saturating_sub(1));
    let mut sup = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        if k == 0 {
            sub.push(sqrt2 * q(0.0));
            sup.push(sqrt2 * q(-1.0));
        } else {
            sub.push(q(k as f64));
            sup.push(q(-((k + 1) as f64)));
        }
    }
    Ok(TridiagonalTruncation {
        c,
        mu,
        diag,
        sub,
        sup,
    })
}

/// Counts eigenvalues of the symmetric tridiagonal (diag, off) below x
/// by the sign pattern of the LDL pivots.
fn sturm_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0usize;
    let mut pivot = diag[0] - x;
    if pivot.abs() < 1e-300 {
        pivot = -1e-300;
    }
    if pivot < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let mut next = diag[i] - x - off[i - 1] * off[i - 1] / pivot;
        if next.abs() < 1e-300 {
            next = -1e-300;
        }
        if next < 0.0 {
            count += 1;
        }
        pivot = next;
    }
    count
}

/// Leftmost eigenvalue of the symmetric tridiagonal (diag, off) by Sturm
/// bisection inside the Gershgorin interval.
fn sturm_leftmost(diag: &[f64], off: &[f64]) -> Result<f64> {
    let n = diag.len();
    let radius = |i: usize| {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        lo = lo.min(diag[i] - radius(i));
        hi = hi.max(diag[i] + radius(i));
    }
    let scale = 1.0_f64.max(lo.abs()).max(hi.abs());
    // Nudge the bounds so the counts at the ends are exact.
    lo -= 1e-8 * scale;
    hi += 1e-8 * scale;
    let mut iterations = 0usize;
    while hi - lo > 1e-10 * scale {
        let mid = 0.5 * (lo + hi);
        if sturm_count_below(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::EigenFailure {
                iterations,
                last: mid,
            });
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Leftmost real eigenvalue via a dense complex eigensolve, for
/// truncations that are not similar to a symmetric matrix.
fn dense_leftmost(t: &TridiagonalTruncation) -> Result<f64> {
    let n = t.n();
    let m = DMatrix::from_fn(n, n, |i, j| t.entry(i, j));
    let eigen: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    let mut best: Option<f64> = None;
    let mut nearest_real = f64::NAN;
    let mut nearest_im = f64::INFINITY;
    for e in &eigen {
        if e.im.abs() <= 1e-8 * (1.0 + e.re.abs()) {
            best = Some(match best {
                Some(b) => b.min(e.re),
                None => e.re,
            });
        } else if e.im.abs() < nearest_im {
            nearest_im = e.im.abs();
            nearest_real = e.re;
        }
    }
    best.ok_or(Error::EigenFailure {
        iterations: 0,
        last: nearest_real,
    })
}

/// One Newton refinement pass on the characteristic determinant, run in
/// ratio form so leading-minor growth never overflows. Falls back to the
/// unpolished value if the iteration wanders or degenerates.
fn newton_polish(t: &TridiagonalTruncation, lambda0: f64) -> f64 {
    let diag = &t.diag;
    let products = t.pair_products();
    let n = t.n();
    let guard = |x: f64| if x.abs() < 1e-300 { 1e-300 } else { x };
    let mut lambda = lambda0;
    for _ in 0..8 {
        // Minor recurrence D_k = (d_k - λ) D_{k-1} - P_{k-1} D_{k-2},
        // tracked as t_k = D_k/D_{k-1} and w_k = D_k'/D_k; the Newton
        // step is 1/w_{N-1}.
        let mut t_ratio = guard(diag[0] - lambda);
        let mut w_prev2 = 0.0_f64;
        let mut w = -1.0 / t_ratio;
        for k in 1..n {
            let v = -1.0 + (diag[k] - lambda) * w - products[k - 1] * w_prev2 / t_ratio;
            let t_next = guard(diag[k] - lambda - products[k - 1] / t_ratio);
            w_prev2 = w;
            w = v / t_next;
            t_ratio = t_next;
        }
        let step = 1.0 / w;
        if !step.is_finite() {
            break;
        }
        lambda -= step;
        if (lambda - lambda0).abs() > 1e-3 * (1.0 + lambda0.abs()) {
            // The polish left the eigensolve's basin; keep the robust value.
            return lambda0;
        }
        if step.abs() <= 1e-15 * (1.0 + lambda.abs()) {
            break;
        }
    }
    lambda
}

/// Smallest real eigenvalue of the truncation. Uses Sturm bisection on
/// the symmetrized matrix when the similarity transform exists (all
/// paired off-diagonal products nonnegative), a dense eigensolve
/// otherwise, and polishes either answer with determinant Newton steps.
pub fn leftmost_eigenvalue(t: &TridiagonalTruncation) -> Result<f64> {
    let products = t.pair_products();
    let raw = if products.iter().all(|&p| p >= 0.0) {
        let off: Vec<f64> = products.iter().map(|&p| p.sqrt()).collect();
        sturm_leftmost(&t.diag, &off)?
    } else {
        dense_leftmost(t)?
    };
    Ok(newton_polish(t, raw))
}

/// p_n = (-n + μ/2)(n + 1 + μ/2) c², the paired product sequence of the
/// continued fraction.
fn cf_product(c: f64, mu: f64, n: usize) -> f64 {
    (-(n as f64) + mu / 2.0) * (n as f64 + 1.0 + mu / 2.0) * c * c
}

/// Characteristic function g(λ) = λ/2 + f₀(λ), with the fraction
/// f_k = p_k/(4(k+1)² - λ - f_{k+1}) evaluated backward from depth.
fn cf_eval(c: f64, mu: f64, depth: usize, lambda: f64) -> f64 {
    let mut f = 0.0_f64;
    for n in (0..depth).rev() {
        let denom = 4.0 * ((n + 1) * (n + 1)) as f64 - lambda - f;
        let denom = if denom.abs() < 1e-300 { 1e-300 } else { denom };
        f = cf_product(c, mu, n) / denom;
    }
    lambda / 2.0 + f
}

/// Root of g nearest 0 at a fixed depth: scan a symmetric interval for
/// sign changes, bisect each, drop pole crossings, keep the smallest in
/// magnitude; the interval grows geometrically until a root appears.
fn cf_root(c: f64, mu: f64, depth: usize) -> Result<f64> {
    let g = |lam: f64| cf_eval(c, mu, depth, lam);
    let mut r = (c.abs() * mu.abs()).max(1.0);
    const SCAN: usize = 64;
    for expansions in 0..=60usize {
        let mut best: Option<f64> = None;
        let mut consider = |root: f64| {
            if best.map_or(true, |b: f64| root.abs() < b.abs()) {
                best = Some(root);
            }
        };
        let mut prev_x = -r;
        let mut prev_g = g(prev_x);
        for i in 1..=SCAN {
            let x = -r + 2.0 * r * i as f64 / SCAN as f64;
            let gx = g(x);
            if gx == 0.0 {
                consider(x);
            } else if prev_g.is_finite() && gx.is_finite() && prev_g * gx < 0.0 {
                let (mut lo, mut hi, mut g_lo) = (prev_x, x, prev_g);
                loop {
                    let mid = 0.5 * (lo + hi);
                    let gm = g(mid);
                    if gm == 0.0 {
                        lo = mid;
                        hi = mid;
                    } else if (gm > 0.0) == (g_lo > 0.0) {
                        lo = mid;
                        g_lo = gm;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
                        break;
                    }
                }
                let root = 0.5 * (lo + hi);
                // A sign change across a pole bisects onto the pole, where
                // |g| stays large; a genuine root drives g to ~0.
                if g(root).abs() <= 1e-3 {
                    consider(root);
                }
            }
            prev_x = x;
            prev_g = gx;
        }
        if let Some(root) = best {
            return Ok(root);
        }
        let _ = expansions;
        r *= 2.0;
    }
    Err(Error::BracketingFailure {
        lo: -r,
        hi: r,
        expansions: 60,
    })
}

/// Roots at the requested depth and at 1.5× the depth, for the
/// convergence-in-depth check.
fn cf_root_pair(c: f64, mu: f64, depth: usize) -> Result<(f64, f64)> {
    let root = cf_root(c, mu, depth)?;
    let deeper = cf_root(c, mu, depth + depth / 2)?;
    Ok((root, deeper))
}

/// λ(μ) as the root nearest 0 of -λ/2 = p₀/(4·1² - λ - p₁/(4·2² - λ - …))
/// truncated at `depth`. Increasing the depth by 50% must move the root
/// by less than `tol`, otherwise the truncation has not converged.
pub fn continued_fraction_lambda(c: f64, mu: f64, depth: usize, tol: f64) -> Result<f64> {
    if !c.is_finite() || !mu.is_finite() {
        return Err(Error::NonFiniteArgument {
            context: "continued_fraction_lambda",
        });
    }
    if depth < 8 {
        return Err(Error::InvalidParameter(format!(
            "continued-fraction depth must be at least 8, got {depth}"
        )));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    // p₀ = (μ/2)(1 + μ/2) c² vanishes at μ = 0 (and trivially at c = 0),
    // collapsing the fraction and leaving the exact root λ = 0.
    if mu == 0.0 || c == 0.0 {
        return Ok(0.0);
    }
    let (root, deeper) = cf_root_pair(c, mu, depth)?;
    if (root - deeper).abs() >= tol {
        return Err(Error::NotConverged {
            context: "continued_fraction_lambda",
            previous: root,
            current: deeper,
        });
    }
    Ok(root)
}

/// λ(μ) by the matrix route at dimension N, with the residual |λ_N - λ_2N|.
fn matrix_lambda_with_residual(c: f64, mu: f64, n: usize) -> Result<(f64, f64)> {
    let coarse = leftmost_eigenvalue(&build_matrix(c, mu, n)?)?;
    let fine = leftmost_eigenvalue(&build_matrix(c, mu, 2 * n)?)?;
    Ok((coarse, (coarse - fine).abs()))
}

/// λ(μ) by the continued-fraction route at the given depth, with the
/// residual against depth + depth/2.
fn cfrac_lambda_with_residual(c: f64, mu: f64, depth: usize) -> Result<(f64, f64)> {
    if mu == 0.0 || c == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (root, deeper) = cf_root_pair(c, mu, depth)?;
    Ok((root, (root - deeper).abs()))
}

fn spectral_route(method: Method) -> Result<Method> {
    match method {
        Method::SpectralMatrix | Method::SpectralCfrac => Ok(method),
        other => Err(Error::InvalidParameter(format!(
            "eigenvalue estimation needs the matrix or cfrac route, got {other}"
        ))),
    }
}

/// One λ(μ) evaluation at an explicit truncation (matrix dimension N or
/// continued-fraction depth D). The residual must land under `tol` or the
/// call fails; no escalation is attempted.
pub fn estimate_lambda_at(
    c: f64,
    mu: f64,
    method: Method,
    truncation: usize,
    tol: f64,
) -> Result<EigenEstimate> {
    let method = spectral_route(method)?;
    if !c.is_finite() || !mu.is_finite() {
        return Err(Error::NonFiniteArgument {
            context: "estimate_lambda_at",
        });
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    if method == Method::SpectralCfrac && truncation < 8 {
        return Err(Error::InvalidParameter(format!(
            "continued-fraction depth must be at least 8, got {truncation}"
        )));
    }
    let (lambda, residual) = match method {
        Method::SpectralMatrix => matrix_lambda_with_residual(c, mu, truncation)?,
        Method::SpectralCfrac => cfrac_lambda_with_residual(c, mu, truncation)?,
        _ => unreachable!("route checked above"),
    };
    if residual > tol {
        return Err(Error::NotConverged {
            context: "estimate_lambda_at",
            previous: lambda,
            current: lambda + residual,
        });
    }
    Ok(EigenEstimate {
        mu,
        lambda,
        method,
        truncation,
        residual,
    })
}

/// λ(μ) at the default truncation (N = 40 or depth = 60), doubling the
/// truncation up to four times until the residual drops under `tol`.
pub fn estimate_lambda(c: f64, mu: f64, method: Method, tol: f64) -> Result<EigenEstimate> {
    let method = spectral_route(method)?;
    if !c.is_finite() || !mu.is_finite() {
        return Err(Error::NonFiniteArgument {
            context: "estimate_lambda",
        });
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    let mut truncation = match method {
        Method::SpectralMatrix => 40usize,
        _ => 60usize,
    };
    let mut last = (0.0, f64::INFINITY);
    for _ in 0..=4 {
        last = match method {
            Method::SpectralMatrix => matrix_lambda_with_residual(c, mu, truncation)?,
            Method::SpectralCfrac => cfrac_lambda_with_residual(c, mu, truncation)?,
            _ => unreachable!("route checked above"),
        };
        if last.1 <= tol {
            return Ok(EigenEstimate {
                mu,
                lambda: last.0,
                method,
                truncation,
                residual: last.1,
            });
        }
        truncation *= 2;
    }
    Err(Error::NotConverged {
        context: "estimate_lambda",
        previous: last.0,
        current: last.0 + last.1,
    })
}

/// λ'(0) and λ''(0) by finite differences of λ(±μ), λ(±μ/2) computed by
/// the chosen spectral route. The headline values carry one Richardson
/// step; the classical one-sided estimates λ(μ)/μ and
/// (λ(μ)/μ - c I_1(-c/2)/I_0(-c/2))/(μ/2) are reported alongside.
pub fn derivatives_by_differencing(
    c: f64,
    mu: f64,
    method: Method,
) -> Result<DerivativeEstimates> {
    let method = spectral_route(method)?;
    if !c.is_finite() || !mu.is_finite() {
        return Err(Error::NonFiniteArgument {
            context: "derivatives_by_differencing",
        });
    }
    if !(mu != 0.0 && mu.abs() <= 0.1) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must satisfy 0 < |mu| <= 0.1, got {mu}"
        )));
    }
    let tol = 1e-12;
    let lam = |m: f64| estimate_lambda(c, m, method, tol).map(|e| e.lambda);
    let plus = lam(mu)?;
    let minus = lam(-mu)?;
    let plus_half = lam(mu / 2.0)?;
    let minus_half = lam(-mu / 2.0)?;
    // Central differences use λ(0) = 0 for the second derivative.
    let d_full = (plus - minus) / (2.0 * mu);
    let d_half = (plus_half - minus_half) / mu;
    let s_full = (plus + minus) / (mu * mu);
    let s_half = (plus_half + minus_half) / (mu * mu / 4.0);
    let bessel_ratio = c * bessel_i(1, -c / 2.0)? / bessel_i(0, -c / 2.0)?;
    Ok(DerivativeEstimates {
        lambda1: (4.0 * d_half - d_full) / 3.0,
        lambda2: (4.0 * s_half - s_full) / 3.0,
        lambda1_central: d_full,
        lambda2_central: s_full,
        lambda1_one_sided: plus / mu,
        lambda2_one_sided: (plus / mu - bessel_ratio) / (mu / 2.0),
        step: mu,
        method,
    })
}
