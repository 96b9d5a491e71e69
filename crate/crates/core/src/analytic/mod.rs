//! Deterministic hop-count functions `N(x)`, hop-length moments and their
//! linear approximations.
//!
//! `N(x)` is the expected number of forwarding transmissions a packet needs
//! to travel beyond distance `x`: zero for `x < 0` and one at the origin.

mod baseline;
mod checks;
mod furthest;
mod linear;
mod planar;
mod random;

pub use baseline::{
    dbar_residual, furthest_dbar_implicit, gamma_baseline_hops, gamma_baseline_intermediate, GammaBaseline,
    GammaBaselineParams,
};
pub use checks::{
    central_difference, continuity_gap, furthest_branch_jump, furthest_ode_residual, random_branch_jump, random_ode_residual,
    residual_grid, CONTINUITY_EPS_FRACTION,
    FD_STEP_FRACTION,
};
pub use furthest::{c_n, n_furthest_1d, psi, FurthestHops};
pub use linear::{furthest_moments_1d, linear_approx, uniform_moments, LinearHops};
pub use planar::{
    chebyshev_bound, e_x2_f2d, e_xf2d, furthest_2d_integral_term, n_furthest_2d_approx, n_random_2d_approx,
    random_2d_moments, Furthest2dHops, MeanMode, Random2dHops,
};
pub use random::{n_random_1d, RandomHops};

use crate::error::{Error, Result};
use crate::params::{Deployment, Geometry, RoutingPolicy};

/// Past `ceil(x/R)` of this many ranges the alternating series give way to
/// the linear approximation.
pub const DEFAULT_SERIES_HORIZON: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HopMethod {
    ExactRandom1D,
    ExactFurthest1D,
    LinearApprox,
    GammaBaseline,
    Approx2D,
    MonteCarlo,
}

/// Anything that can evaluate `N(x)`.
pub trait HopFunction: Send + Sync {
    fn hops(&self, x: f64) -> Result<f64>;
    fn method(&self) -> HopMethod;
    fn r_tx(&self) -> f64;
}

impl<T: HopFunction + ?Sized> HopFunction for &T {
    fn hops(&self, x: f64) -> Result<f64> {
        (**self).hops(x)
    }
    fn method(&self) -> HopMethod {
        (**self).method()
    }
    fn r_tx(&self) -> f64 {
        (**self).r_tx()
    }
}

impl<T: HopFunction + ?Sized> HopFunction for Box<T> {
    fn hops(&self, x: f64) -> Result<f64> {
        (**self).hops(x)
    }
    fn method(&self) -> HopMethod {
        (**self).method()
    }
    fn r_tx(&self) -> f64 {
        (**self).r_tx()
    }
}

/// The most exact analytic hop function available for a policy and
/// deployment: the closed forms on a line, the linear approximations in
/// the plane.
pub fn exact_hop_function(policy: RoutingPolicy, deployment: &Deployment, r_tx: f64) -> Result<Box<dyn HopFunction>> {
    Ok(match (policy, deployment.geometry()) {
        (RoutingPolicy::RandomNeighbor, Geometry::Line { .. }) => Box::new(RandomHops::new(r_tx)?),
        (RoutingPolicy::FurthestNeighbor, Geometry::Line { .. }) => {
            Box::new(FurthestHops::new(deployment.lambda(), r_tx)?)
        }
        (RoutingPolicy::RandomNeighbor, Geometry::Sector { .. }) => Box::new(Random2dHops::new(r_tx)?),
        (RoutingPolicy::FurthestNeighbor, Geometry::Sector { aop_theta, .. }) => Box::new(Furthest2dHops::new(
            deployment.lambda(),
            aop_theta,
            r_tx,
            MeanMode::Exact,
        )?),
    })
}

/// The linear approximation for a policy and deployment.
pub fn approx_hop_function(policy: RoutingPolicy, deployment: &Deployment, r_tx: f64) -> Result<Box<dyn HopFunction>> {
    Ok(match (policy, deployment.geometry()) {
        (RoutingPolicy::RandomNeighbor, Geometry::Line { .. }) => Box::new(LinearHops::random_1d(r_tx)?),
        (RoutingPolicy::FurthestNeighbor, Geometry::Line { .. }) => {
            Box::new(LinearHops::furthest_1d(deployment.lambda(), r_tx)?)
        }
        (RoutingPolicy::RandomNeighbor, Geometry::Sector { .. }) => Box::new(Random2dHops::new(r_tx)?),
        (RoutingPolicy::FurthestNeighbor, Geometry::Sector { aop_theta, .. }) => Box::new(Furthest2dHops::new(
            deployment.lambda(),
            aop_theta,
            r_tx,
            MeanMode::Approx,
        )?),
    })
}

/// Mean single-hop progress implied by the analytic model: `R/2` and the
/// furthest-hop mean on a line, `2R/3` and `E[X_F2D]` in the plane.
pub fn analytic_mean_hop(policy: RoutingPolicy, deployment: &Deployment, r_tx: f64) -> Result<f64> {
    Ok(match (policy, deployment.geometry()) {
        (RoutingPolicy::RandomNeighbor, Geometry::Line { .. }) => uniform_moments(r_tx)?.0,
        (RoutingPolicy::FurthestNeighbor, Geometry::Line { .. }) => furthest_moments_1d(deployment.lambda(), r_tx)?.0,
        (RoutingPolicy::RandomNeighbor, Geometry::Sector { .. }) => random_2d_moments(r_tx)?.0,
        (RoutingPolicy::FurthestNeighbor, Geometry::Sector { aop_theta, .. }) => {
            e_xf2d(deployment.lambda(), aop_theta, r_tx, MeanMode::Exact)?
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopSample {
    pub x: f64,
    pub n: f64,
    pub stderr: Option<f64>,
}

/// Parameters a curve was computed with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    pub r_tx: f64,
    pub lambda: Option<f64>,
    pub aop_theta: Option<f64>,
}

/// Tabulated `N(x)`: strictly increasing `x`, nondecreasing `n`, and a
/// standard error on every sample iff the curve is a Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct HopCurve {
    samples: Vec<HopSample>,
    method: HopMethod,
    params: CurveParams,
}

impl HopCurve {
    pub fn new(samples: Vec<HopSample>, method: HopMethod, params: CurveParams) -> Result<Self> {
        for w in samples.windows(2) {
            if !(w[1].x > w[0].x) {
                return Err(Error::InvalidParams(format!(
                    "hop curve x values must be strictly increasing ({} then {})",
                    w[0].x, w[1].x
                )));
            }
            if w[1].n < w[0].n {
                return Err(Error::InvalidParams(format!(
                    "hop curve decreases between x={} ({}) and x={} ({})",
                    w[0].x, w[0].n, w[1].x, w[1].n
                )));
            }
        }
        let monte_carlo = method == HopMethod::MonteCarlo;
        if samples.iter().any(|s| s.stderr.is_some() != monte_carlo) {
            return Err(Error::InvalidParams(
                "standard errors must be present exactly on Monte Carlo curves".into(),
            ));
        }
        Ok(Self {
            samples,
            method,
            params,
        })
    }

    /// Evaluates `hop_fn` on `grid`.
    pub fn tabulate(hop_fn: &dyn HopFunction, grid: &[f64], params: CurveParams) -> Result<Self> {
        let samples = grid
            .iter()
            .map(|&x| {
                Ok(HopSample {
                    x,
                    n: hop_fn.hops(x)?,
                    stderr: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, hop_fn.method(), params)
    }

    pub fn samples(&self) -> &[HopSample] {
        &self.samples
    }

    pub fn method(&self) -> HopMethod {
        self.method
    }

    pub fn params(&self) -> CurveParams {
        self.params
    }
}
