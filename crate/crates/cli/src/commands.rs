use hopcap::analytic::{
    analytic_mean_hop, approx_hop_function, e_x2_f2d, exact_hop_function, furthest_moments_1d, random_2d_moments,
    uniform_moments, GammaBaseline, HopFunction,
};
use hopcap::simulate::{estimate_hidden, estimate_hop_moments, estimate_n};
use hopcap::throughput::{hidden_node_expected, t_max_mac, t_max_perfect, t_of_r_mac, t_of_r_perfect};
use hopcap::{Geometry, RoutingPolicy};

use crate::config::RunConfig;
use crate::output::{num, opt, CsvOut};
use crate::CliError;

fn gamma_baseline(cfg: &RunConfig) -> Result<Option<GammaBaseline>, CliError> {
    if cfg.dim != 1 {
        return Ok(None);
    }
    let (lambda, r) = (cfg.lambda, cfg.radio.r_tx());
    Ok(Some(match cfg.policy {
        RoutingPolicy::RandomNeighbor => GammaBaseline::random(lambda, r)?,
        RoutingPolicy::FurthestNeighbor => GammaBaseline::furthest(lambda, r)?,
    }))
}

pub fn hopcurve(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.x_grid()?;
    let r = cfg.radio.r_tx();
    let exact = exact_hop_function(cfg.policy, &cfg.deployment, r)?;
    let approx = approx_hop_function(cfg.policy, &cfg.deployment, r)?;
    let baseline = gamma_baseline(cfg)?;
    let mc = estimate_n(&grid, cfg.policy, &cfg.deployment, r, &cfg.mc_settings())?;

    let mut out = CsvOut::new(
        &cfg.header_line(),
        &["x_m", "analytic_exact", "analytic_approx", "gamma_baseline", "mc_mean", "mc_stderr", "trials", "censored"],
    )?;
    for (&x, est) in grid.iter().zip(&mc.estimates) {
        let g = baseline.as_ref().map(|b| b.hops(x)).transpose()?;
        out.row(&[
            num(x),
            num(exact.hops(x)?),
            num(approx.hops(x)?),
            opt(g),
            num(est.mean),
            num(est.stderr),
            est.trials_run.to_string(),
            est.trials_censored.to_string(),
        ])?;
    }
    if let Some(d) = mc.estimates.first().and_then(|e| e.censoring_diagnostic()) {
        eprintln!("hopcap: {d}");
    }
    eprintln!(
        "hopcap: {} points, {} policy, N({}) = {} (closed form) vs {} (Monte Carlo)",
        grid.len(),
        cfg.policy,
        grid[grid.len() - 1],
        exact.hops(grid[grid.len() - 1])?,
        mc.estimates[grid.len() - 1].mean
    );
    out.finish(cfg.out.as_deref())
}

pub fn hidden(cfg: &RunConfig) -> Result<(), CliError> {
    let mut grid = vec![0.0];
    grid.extend(cfg.x_grid()?);
    let r = cfg.radio.r_tx();
    let exact = exact_hop_function(cfg.policy, &cfg.deployment, r)?;
    let mc = estimate_hidden(&grid, cfg.policy, &cfg.deployment, r, &cfg.mc_settings())?;

    let mut out = CsvOut::new(
        &cfg.header_line(),
        &["x_m", "mean_hop_m", "analytic", "mc_mean", "mc_stderr", "trials", "censored"],
    )?;
    for (&x, est) in grid.iter().zip(&mc.estimates) {
        out.row(&[
            num(x),
            num(mc.mean_hop),
            num(hidden_node_expected(x, mc.mean_hop, exact.as_ref())?),
            num(est.mean),
            num(est.stderr),
            est.trials_run.to_string(),
            est.trials_censored.to_string(),
        ])?;
    }
    eprintln!("hopcap: hidden-node window E[d] = {} m over {} points", mc.mean_hop, grid.len());
    out.finish(cfg.out.as_deref())
}

/// Analytic single-hop mean and second moment.
pub fn analytic_moments(cfg: &RunConfig) -> Result<(f64, f64), CliError> {
    let r = cfg.radio.r_tx();
    Ok(match (cfg.policy, cfg.deployment.geometry()) {
        (RoutingPolicy::RandomNeighbor, Geometry::Line { .. }) => uniform_moments(r)?,
        (RoutingPolicy::FurthestNeighbor, Geometry::Line { .. }) => furthest_moments_1d(cfg.lambda, r)?,
        (RoutingPolicy::RandomNeighbor, Geometry::Sector { .. }) => random_2d_moments(r)?,
        (RoutingPolicy::FurthestNeighbor, Geometry::Sector { aop_theta, .. }) => (
            analytic_mean_hop(cfg.policy, &cfg.deployment, r)?,
            e_x2_f2d(cfg.lambda, aop_theta, r)?,
        ),
    })
}

pub fn moments(cfg: &RunConfig) -> Result<(), CliError> {
    let (m1, m2) = analytic_moments(cfg)?;
    let mc = estimate_hop_moments(cfg.policy, &cfg.deployment, cfg.radio.r_tx(), &cfg.mc_settings())?;
    let mut out = CsvOut::new(
        &cfg.header_line(),
        &["quantity", "analytic", "mc_mean", "mc_stderr", "trials", "censored"],
    )?;
    for (name, analytic, est) in [("mean_m", m1, mc.mean), ("second_moment_m2", m2, mc.second_moment)] {
        out.row(&[
            name.to_string(),
            num(analytic),
            num(est.mean),
            num(est.stderr),
            est.trials_run.to_string(),
            est.trials_censored.to_string(),
        ])?;
    }
    eprintln!("hopcap: mean hop {} m (analytic) vs {} m (Monte Carlo)", m1, mc.mean.mean);
    out.finish(cfg.out.as_deref())
}

pub fn throughput(cfg: &RunConfig) -> Result<(), CliError> {
    let rates = cfg.rate_grid()?;
    let radio = &cfg.radio;
    let hop = exact_hop_function(cfg.policy, &cfg.deployment, radio.r_tx())?;
    let blocking = hop.hops(radio.r_i())?;
    let perfect = t_max_perfect(radio.capacity_c(), blocking)?;
    let fixed = t_max_mac(radio, hop.as_ref())?;

    let mut out = CsvOut::new(
        &cfg.header_line(),
        &["r_bps", "x_airtime", "p_col", "t_perfect_bps", "t_mac_bps", "beyond_validity_flag"],
    )?;
    for &r in rates {
        let p = t_of_r_perfect(r, radio.capacity_c(), blocking)?;
        let m = t_of_r_mac(r, radio, hop.as_ref())?;
        out.row(&[
            num(r),
            num(m.airtime_x),
            opt(m.p_col),
            num(p.throughput),
            num(m.throughput),
            u8::from(m.beyond_validity).to_string(),
        ])?;
    }
    out.footer(format!(
        "t_max_perfect_bps={} t_max_mac_bps={} fixed_point_residual={}",
        num(perfect),
        num(fixed.result.throughput),
        num(fixed.residual)
    ));
    eprintln!(
        "hopcap: T_max = {:.1} bit/s (perfect MAC), {:.1} bit/s (802.11, p_col = {:.4})",
        perfect,
        fixed.result.throughput,
        fixed.result.p_col.unwrap_or(f64::NAN)
    );
    out.finish(cfg.out.as_deref())
}
