//! Lyapunov exponent and CLT variance of the 2-D linear Stratonovich SDE
//!
//! ```text
//! dX = diag(a, b) X dt + sigma [[0, -1], [1, 0]] X ∘ dW,      a > b, sigma > 0
//! ```
//!
//! The top Lyapunov exponent `ell = lim (1/t) ln |X_t|` and the variance
//! `s^2` of the central limit theorem for `(1/t) ln |X_t|` are computed by
//! three mutually independent routes:
//!
//! * [`perturbation`]: closed forms built from the eigenvalue perturbation
//!   of a periodic boundary-value problem, via modified Bessel functions
//!   ([`specfun`]) and periodic quadrature ([`quadrature`]);
//! * [`spectral`]: the leftmost eigenvalue of a truncated tridiagonal
//!   operator and an equivalent continued-fraction equation, with
//!   finite-difference extraction of the derivatives;
//! * [`mc_sim`]: Monte Carlo time averages of the projected angle process.
//!
//! Agreement of the three routes is the library's correctness argument; the
//! CLI front end exposes each route and a cross-validation battery.

pub mod error;
pub mod mc_sim;
pub mod perturbation;
pub mod quadrature;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
