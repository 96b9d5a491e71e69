//! Approximate hop functions for planar deployments, where next hops are
//! chosen inside a sector of angle `theta` aimed at the destination.

use crate::analytic::{linear_approx, HopFunction, HopMethod};
use crate::error::{ensure_non_negative, ensure_positive, Result};
use crate::numeric::adaptive_simpson;

const QUAD_REL_TOL: f64 = 1e-10;

/// Mean and second moment of the distance to a uniformly chosen node in
/// a sector of radius `r_tx`: `2R/3` and `R^2/2`.
pub fn random_2d_moments(r_tx: f64) -> Result<(f64, f64)> {
    ensure_positive("r_tx", r_tx)?;
    Ok((2.0 * r_tx / 3.0, r_tx * r_tx / 2.0))
}

/// `3x/(2R) + 9/16`: the linear approximation with the sector moments.
pub fn n_random_2d_approx(x: f64, r_tx: f64) -> Result<f64> {
    ensure_non_negative("x", x)?;
    let (m1, m2) = random_2d_moments(r_tx)?;
    linear_approx(x, m1, m2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanMode {
    /// Evaluates the Gaussian-type integral by quadrature.
    #[default]
    Exact,
    /// Replaces the integral term by its upper bound `2/(R lambda theta)`.
    Approx,
}

fn sector_exponent(lambda: f64, theta: f64, r_tx: f64) -> Result<f64> {
    ensure_positive("lambda", lambda)?;
    ensure_positive("theta", theta)?;
    ensure_positive("r_tx", r_tx)?;
    Ok(0.5 * theta * lambda * r_tx * r_tx)
}

/// The subtracted term of the furthest-node mean,
/// `int_0^R e^{(theta/2) lambda x^2} dx / (e^{(theta/2) lambda R^2} - 1)`,
/// evaluated with the integrand rescaled by `e^{-(theta/2) lambda R^2}` so
/// it never overflows.
pub fn furthest_2d_integral_term(lambda: f64, theta: f64, r_tx: f64) -> Result<f64> {
    let big_a = sector_exponent(lambda, theta, r_tx)?;
    let a = 0.5 * theta * lambda;
    let scaled = adaptive_simpson(|x| (a * x * x - big_a).exp(), 0.0, r_tx, QUAD_REL_TOL)?;
    Ok(scaled / -(-big_a).exp_m1())
}

/// Upper bound on [`furthest_2d_integral_term`]: `2/(R lambda theta)`.
pub fn chebyshev_bound(lambda: f64, theta: f64, r_tx: f64) -> Result<f64> {
    sector_exponent(lambda, theta, r_tx)?;
    Ok(2.0 / (r_tx * lambda * theta))
}

/// Mean distance to the furthest node in the sector, given at least one
/// node. `Approx` is never larger than `Exact`.
pub fn e_xf2d(lambda: f64, theta: f64, r_tx: f64, mode: MeanMode) -> Result<f64> {
    let big_a = sector_exponent(lambda, theta, r_tx)?;
    let lead = r_tx / -(-big_a).exp_m1();
    let term = match mode {
        MeanMode::Exact => furthest_2d_integral_term(lambda, theta, r_tx)?,
        MeanMode::Approx => chebyshev_bound(lambda, theta, r_tx)?,
    };
    Ok(lead - term)
}

/// Exact second moment: `R^2 e^A / (e^A - 1) - 2/(lambda theta)`.
pub fn e_x2_f2d(lambda: f64, theta: f64, r_tx: f64) -> Result<f64> {
    let big_a = sector_exponent(lambda, theta, r_tx)?;
    Ok(r_tx * r_tx / -(-big_a).exp_m1() - 2.0 / (lambda * theta))
}

/// `(x + R/2) / E[X_F2D]`, the linear form obtained with
/// `E[X^2] ~ R E[X]`.
pub fn n_furthest_2d_approx(x: f64, lambda: f64, theta: f64, r_tx: f64, mode: MeanMode) -> Result<f64> {
    ensure_non_negative("x", x)?;
    let mean = e_xf2d(lambda, theta, r_tx, mode)?;
    Ok((x + r_tx / 2.0) / mean)
}

#[derive(Debug, Clone, Copy)]
pub struct Random2dHops {
    r_tx: f64,
}

impl Random2dHops {
    pub fn new(r_tx: f64) -> Result<Self> {
        ensure_positive("r_tx", r_tx)?;
        Ok(Self { r_tx })
    }
}

impl HopFunction for Random2dHops {
    fn hops(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        n_random_2d_approx(x, self.r_tx)
    }

    fn method(&self) -> HopMethod {
        HopMethod::Approx2D
    }

    fn r_tx(&self) -> f64 {
        self.r_tx
    }
}

/// Furthest-neighbor planar hop function; the mean hop is computed once.
#[derive(Debug, Clone, Copy)]
pub struct Furthest2dHops {
    r_tx: f64,
    mean: f64,
}

impl Furthest2dHops {
    pub fn new(lambda: f64, theta: f64, r_tx: f64, mode: MeanMode) -> Result<Self> {
        Ok(Self {
            r_tx,
            mean: e_xf2d(lambda, theta, r_tx, mode)?,
        })
    }

    pub fn mean_hop(&self) -> f64 {
        self.mean
    }
}

impl HopFunction for Furthest2dHops {
    fn hops(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        Ok((x + self.r_tx / 2.0) / self.mean)
    }

    fn method(&self) -> HopMethod {
        HopMethod::Approx2D
    }

    fn r_tx(&self) -> f64 {
        self.r_tx
    }
}
