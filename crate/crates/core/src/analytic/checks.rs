//! Numerical self-checks of the closed forms against the delay
//! differential equations they solve.
//!
//! Random routing: `N'(x) = (N(x) - N(x-R)) / R`.
//! Furthest routing: `N'(x) = kappa (N(x) - N(x-R)) - lambda` with
//! `kappa = lambda / (1 - e^{-lambda R})`.

use crate::analytic::{FurthestHops, HopFunction, RandomHops};
use crate::error::{ensure_positive, Result};

/// Finite-difference step as a fraction of the range.
pub const FD_STEP_FRACTION: f64 = 1e-3;

/// Offset from a multiple of the range used for continuity gaps, as a
/// fraction of the range.
pub const CONTINUITY_EPS_FRACTION: f64 = 1e-9;

/// `(N(x+h) - N(x-h)) / 2h`.
pub fn central_difference(hop_fn: &dyn HopFunction, x: f64, h: f64) -> Result<f64> {
    ensure_positive("h", h)?;
    Ok((hop_fn.hops(x + h)? - hop_fn.hops(x - h)?) / (2.0 * h))
}

/// `|N'(x) - (N(x) - N(x-R))/R|` with `N'` by central difference of step
/// `step_fraction * R`.
pub fn random_ode_residual(hops: &RandomHops, x: f64, step_fraction: f64) -> Result<f64> {
    let r = hops.r_tx();
    let d = central_difference(hops, x, step_fraction * r)?;
    Ok((d - (hops.eval(x) - hops.eval(x - r)) / r).abs())
}

/// `|N'(x) - kappa (N(x) - N(x-R)) + lambda|` with `N'` by central
/// difference of step `step_fraction * R`.
pub fn furthest_ode_residual(hops: &FurthestHops, x: f64, step_fraction: f64) -> Result<f64> {
    let r = HopFunction::r_tx(hops);
    let lambda = hops.lambda();
    let kappa = lambda / -(-lambda * r).exp_m1();
    let d = central_difference(hops, x, step_fraction * r)?;
    Ok((d - kappa * (hops.eval(x)? - hops.eval(x - r)?) + lambda).abs())
}

/// `|N(x - eps) - N(x + eps)|`.
pub fn continuity_gap(hop_fn: &dyn HopFunction, x: f64, eps: f64) -> Result<f64> {
    ensure_positive("eps", eps)?;
    Ok((hop_fn.hops(x - eps)? - hop_fn.hops(x + eps)?).abs())
}

/// `|branch_n(nR) - branch_{n+1}(nR)|`: the jump between the one-sided
/// limits of the random-routing series at `x = nR`.
pub fn random_branch_jump(hops: &RandomHops, n: u32) -> f64 {
    let x = n as f64 * hops.r_tx();
    (hops.branch(n, x) - hops.branch(n + 1, x)).abs()
}

/// The same jump for the furthest-routing closed form.
pub fn furthest_branch_jump(hops: &FurthestHops, n: u32) -> Result<f64> {
    let x = n as f64 * HopFunction::r_tx(hops);
    Ok((hops.branch(n, x)? - hops.branch(n + 1, x)?).abs())
}

/// Interval midpoints `R (n + (k + 1/2)/per_range)` covering `(R, n_max R]`.
/// Staying off multiples of `R` keeps the difference stencil clear of the
/// points where higher derivatives jump.
pub fn residual_grid(r_tx: f64, n_max: u32, per_range: u32) -> Vec<f64> {
    (1..n_max)
        .flat_map(|n| (0..per_range).map(move |k| r_tx * (n as f64 + (k as f64 + 0.5) / per_range as f64)))
        .collect()
}
