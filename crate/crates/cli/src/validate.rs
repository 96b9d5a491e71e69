//! Invariant suite behind `hopcap validate`.

use hopcap::analytic::{
    e_xf2d, exact_hop_function, furthest_branch_jump, furthest_ode_residual, random_branch_jump, random_ode_residual,
    residual_grid, chebyshev_bound, furthest_2d_integral_term, analytic_mean_hop, FurthestHops, HopFunction,
    MeanMode, RandomHops,
};
use hopcap::simulate::{estimate_hop_moments, TrialEstimate};
use hopcap::throughput::{hidden_node_expected, t_max_mac, t_max_perfect};
use hopcap::{Geometry, RoutingPolicy};

use crate::commands::analytic_moments;
use crate::config::RunConfig;
use crate::output::{num, CsvOut};
use crate::CliError;

/// Central-difference step, as a fraction of the range, for the
/// delay-equation residuals. Small enough that the stencil's truncation
/// error stays below the tolerance at every density.
const FD_STEP_FRACTION: f64 = 1e-4;

pub struct Check {
    pub name: String,
    pub measured: f64,
    pub limit: f64,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            limit,
        }
    }

    pub fn passed(&self) -> bool {
        self.measured <= self.limit
    }
}

fn max_of(values: impl IntoIterator<Item = hopcap::Result<f64>>) -> hopcap::Result<f64> {
    values.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

fn z_score(est: &TrialEstimate, target: f64) -> f64 {
    (est.mean - target).abs() / est.stderr.max(1.0 / est.trials_run as f64)
}

pub fn checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let s = cfg.tol_scale;
    let r = cfg.radio.r_tx();
    let grid = residual_grid(r, 10, 20);
    let mut out = Vec::new();

    let random = RandomHops::new(r)?;
    out.push(Check::new(
        "random-ode-residual",
        max_of(grid.iter().map(|&x| random_ode_residual(&random, x, FD_STEP_FRACTION)))?,
        1e-6 * s,
    ));
    out.push(Check::new(
        "random-branch-jump",
        (1..=10).map(|n| random_branch_jump(&random, n)).fold(0.0, f64::max),
        1e-10 * s,
    ));
    let linear_gap = (50..=200)
        .map(|k| {
            let x = k as f64 * r / 10.0;
            (random.eval(x) - (2.0 * x / r + 2.0 / 3.0)).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("random-linear-gap", linear_gap, 0.06 * s));

    match cfg.deployment.geometry() {
        Geometry::Line { .. } => {
            let furthest = FurthestHops::new(cfg.lambda, r)?;
            out.push(Check::new(
                "furthest-ode-residual",
                max_of(grid.iter().map(|&x| furthest_ode_residual(&furthest, x, FD_STEP_FRACTION)))?,
                1e-6 * s,
            ));
            out.push(Check::new(
                "furthest-branch-jump",
                max_of((1..=10).map(|n| furthest_branch_jump(&furthest, n)))?,
                1e-10 * s,
            ));
        }
        Geometry::Sector { aop_theta, .. } => {
            let term = furthest_2d_integral_term(cfg.lambda, aop_theta, r)?;
            let bound = chebyshev_bound(cfg.lambda, aop_theta, r)?;
            out.push(Check::new("chebyshev-bound-ratio", term / bound, 1.0));
            let exact = e_xf2d(cfg.lambda, aop_theta, r, MeanMode::Exact)?;
            let approx = e_xf2d(cfg.lambda, aop_theta, r, MeanMode::Approx)?;
            out.push(Check::new("approx-exceeds-exact-m", (approx - exact).max(0.0), 0.0));
        }
    }

    for policy in [RoutingPolicy::RandomNeighbor, RoutingPolicy::FurthestNeighbor] {
        let hop = exact_hop_function(policy, &cfg.deployment, r)?;
        let mean_hop = analytic_mean_hop(policy, &cfg.deployment, r)?;
        let dev = max_of((31..=100).map(|k| {
            let x = k as f64 * r / 10.0;
            hidden_node_expected(x, mean_hop, hop.as_ref()).map(|v| (v - 1.0).abs())
        }))?;
        out.push(Check::new(format!("hidden-node-limit-{policy}"), dev, 0.1 * s));

        let radio = &cfg.radio;
        let fixed = t_max_mac(radio, hop.as_ref())?;
        out.push(Check::new(format!("fixed-point-residual-{policy}"), fixed.residual, 1e-9 * s));
        let ceiling = radio.capacity_c() / (1.0 + hop.hops(radio.r_cs())?);
        let perfect = t_max_perfect(radio.capacity_c(), hop.hops(radio.r_i())?)?;
        let violation = (fixed.result.throughput - ceiling).max(ceiling - perfect).max(0.0);
        out.push(Check::new(format!("throughput-ordering-{policy}"), violation, 0.0));
    }

    let (m1, m2) = analytic_moments(cfg)?;
    let mc = estimate_hop_moments(cfg.policy, &cfg.deployment, r, &cfg.mc_settings())?;
    out.push(Check::new("moment-mean-z", z_score(&mc.mean, m1), 3.0 * s));
    out.push(Check::new("moment-second-z", z_score(&mc.second_moment, m2), 3.0 * s));
    Ok(out)
}

/// Prints one line per check; returns whether all passed.
pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    let checks = checks(cfg)?;
    let mut csv = CsvOut::new(&cfg.header_line(), &["check", "measured", "limit", "status"])?;
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        println!("{status} {:<32} measured={:e} limit={:e}", c.name, c.measured, c.limit);
        csv.row(&[c.name.clone(), num(c.measured), num(c.limit), status.to_string()])?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {} failed", checks.len(), failed);
    if let Some(path) = cfg.out.as_deref() {
        csv.finish(Some(path))?;
    }
    Ok(failed == 0)
}
