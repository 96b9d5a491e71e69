//! Gamma-distribution baseline for the number of intermediate nodes
//! between a source and a point at distance `D`, driven only by the mean
//! hop length. Kept for comparison against the exact hop functions.

use statrs::function::gamma::checked_gamma_lr;

use crate::analytic::{HopFunction, HopMethod};
use crate::error::{ensure_positive, Error, Result};
use crate::numeric::bisect;

const TAIL_MASS: f64 = 1e-12;
const CAP_FACTOR: f64 = 10.0;

/// Validated inputs of the baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaBaselineParams {
    d_bar: f64,
    lambda: f64,
    beta: f64,
    r_tx: f64,
}

impl GammaBaselineParams {
    /// `beta = 1 + d_bar lambda`; requires `0 < d_bar <= r_tx`.
    pub fn new(d_bar: f64, lambda: f64, r_tx: f64) -> Result<Self> {
        ensure_positive("d_bar", d_bar)?;
        ensure_positive("lambda", lambda)?;
        ensure_positive("r_tx", r_tx)?;
        if d_bar > r_tx {
            return Err(Error::Domain {
                name: "d_bar",
                value: d_bar,
                expected: "must not exceed r_tx",
            });
        }
        Ok(Self {
            d_bar,
            lambda,
            beta: 1.0 + d_bar * lambda,
            r_tx,
        })
    }

    pub fn d_bar(&self) -> f64 {
        self.d_bar
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Expected number of intermediate nodes at distance `distance_d`.
    pub fn intermediate_mean(&self, distance_d: f64) -> Result<f64> {
        gamma_baseline_intermediate(distance_d, self.lambda, self.d_bar)
    }
}

/// Normalized lower incomplete gamma `gamma(shape, lambda x) / Gamma(shape)`.
fn lower_gamma(shape: f64, scaled_x: f64) -> Result<f64> {
    checked_gamma_lr(shape, scaled_x).map_err(|_| Error::Domain {
        name: "gamma shape",
        value: shape,
        expected: "must be > 0 with a non-negative argument",
    })
}

/// `sum_n n P(N_H = n)` with
/// `P(N_H = n) = P(n beta, lambda D) - P((n+1) beta, lambda D)`,
/// summed until the remaining tail mass drops below 1e-12.
pub fn gamma_baseline_intermediate(distance_d: f64, lambda: f64, d_bar: f64) -> Result<f64> {
    ensure_positive("distance_d", distance_d)?;
    ensure_positive("lambda", lambda)?;
    ensure_positive("d_bar", d_bar)?;
    let beta = 1.0 + d_bar * lambda;
    let scaled = lambda * distance_d;
    let cap = (CAP_FACTOR * (distance_d / d_bar).ceil()).max(CAP_FACTOR) as u64;

    let mut mean = 0.0;
    let mut upper = lower_gamma(beta, scaled)?;
    for n in 1..=cap {
        let lower = lower_gamma((n + 1) as f64 * beta, scaled)?;
        mean += n as f64 * (upper - lower);
        if lower < TAIL_MASS {
            return Ok(mean);
        }
        upper = lower;
    }
    Err(Error::NoConvergence {
        what: "gamma baseline tail",
        achieved: upper,
    })
}

/// Baseline hop count: one transmission more than the number of
/// intermediate nodes, matching the convention that the source's own
/// transmission is counted.
pub fn gamma_baseline_hops(distance_d: f64, lambda: f64, d_bar: f64) -> Result<f64> {
    gamma_baseline_intermediate(distance_d, lambda, d_bar).map(|m| 1.0 + m)
}

/// Residual of `d = (1/lambda) ln(1 - lambda d / (lambda - lambda d - 1))`.
pub fn dbar_residual(d: f64, lambda: f64) -> f64 {
    let arg = 1.0 - lambda * d / (lambda - lambda * d - 1.0);
    d - arg.ln() / lambda
}

/// Solves the implicit mean-hop equation for furthest routing by a bracket
/// scan over `(0, 1/lambda)` followed by bisection. The scan starts away
/// from the trivial root at zero.
pub fn furthest_dbar_implicit(lambda: f64) -> Result<f64> {
    ensure_positive("lambda", lambda)?;
    let hi = 1.0 / lambda;
    let steps = 4000;
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..steps {
        let d = hi * i as f64 / steps as f64;
        let g = dbar_residual(d, lambda);
        if !g.is_finite() {
            prev = None;
            continue;
        }
        if let Some((d0, g0)) = prev {
            if g0.signum() != g.signum() {
                return bisect("implicit mean hop length", |d| dbar_residual(d, lambda), d0, d, 0.0, 1e-13);
            }
        }
        prev = Some((d, g));
    }
    Err(Error::NoRoot {
        what: "implicit mean hop length",
        lo: 0.0,
        hi,
    })
}

/// Baseline as a hop function over distance.
#[derive(Debug, Clone, Copy)]
pub struct GammaBaseline {
    params: GammaBaselineParams,
}

impl GammaBaseline {
    pub fn new(params: GammaBaselineParams) -> Self {
        Self { params }
    }

    /// Random routing: mean hop `R/2`.
    pub fn random(lambda: f64, r_tx: f64) -> Result<Self> {
        GammaBaselineParams::new(r_tx / 2.0, lambda, r_tx).map(Self::new)
    }

    /// Furthest routing with the implicitly defined mean hop.
    pub fn furthest(lambda: f64, r_tx: f64) -> Result<Self> {
        GammaBaselineParams::new(furthest_dbar_implicit(lambda)?, lambda, r_tx).map(Self::new)
    }

    pub fn params(&self) -> GammaBaselineParams {
        self.params
    }
}

impl HopFunction for GammaBaseline {
    fn hops(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        if x == 0.0 {
            return Ok(1.0);
        }
        gamma_baseline_hops(x, self.params.lambda, self.params.d_bar)
    }

    fn method(&self) -> HopMethod {
        HopMethod::GammaBaseline
    }

    fn r_tx(&self) -> f64 {
        self.params.r_tx
    }
}
