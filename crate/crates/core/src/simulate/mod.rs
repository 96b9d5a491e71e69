//! Seeded Monte Carlo oracle over Poisson deployments.
//!
//! Each trial draws its randomness from its own ChaCha stream selected by
//! `(master_seed, trial_index)`. Trials run in parallel and are reduced in
//! trial-index order, so every estimate is bitwise reproducible regardless
//! of the thread count.
//!
//! A trial in which the walk hits a dead end (no forward neighbor in
//! range) before crossing every target is censored as a whole.

mod ppp;
mod routing;

pub use ppp::{sample_ppp_1d, sample_ppp_rect, sample_ppp_sector, Point, Polar};
pub use routing::{choose_candidate, in_sector, route_next_hop_1d, route_next_hop_2d};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analytic::{analytic_mean_hop, CurveParams, HopCurve, HopMethod, HopSample};
use crate::error::{ensure_positive, Error, Result};
use crate::params::{Deployment, Geometry, RoutingPolicy};

/// Walks longer than this are treated as dead ends.
const MAX_HOPS: u32 = 1_000_000;

/// Censoring above this fraction triggers a diagnostic.
pub const CENSORING_WARN_FRACTION: f64 = 0.05;

/// Identifies one trial's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededRun {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeededRun {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub trials: usize,
    pub master_seed: u64,
    pub ci_level: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            trials: 2000,
            master_seed: 0,
            ci_level: 0.99,
        }
    }
}

impl McSettings {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 trials, got {}", self.trials)));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Domain {
                name: "ci_level",
                value: self.ci_level,
                expected: "must lie in (0, 1)",
            });
        }
        Ok(())
    }

    /// Runs `f` for every trial index in parallel, results in index order.
    fn run<T: Send>(&self, f: impl Fn(SeededRun) -> T + Sync + Send) -> Vec<T> {
        let seed = self.master_seed;
        (0..self.trials as u64)
            .into_par_iter()
            .map(|i| f(SeededRun::new(seed, i)))
            .collect()
    }
}

/// Monte Carlo mean with its standard error over uncensored trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub ci_level: f64,
    pub trials_run: usize,
    pub trials_censored: usize,
}

impl TrialEstimate {
    /// `values` holds one entry per uncensored trial out of `trials_run`.
    pub fn from_values(values: &[f64], trials_run: usize, ci_level: f64) -> Result<Self> {
        let n = values.len();
        if n > trials_run {
            return Err(Error::InvalidParams(format!("{n} values from {trials_run} trials")));
        }
        if n == 0 {
            return Err(Error::InvalidParams("no uncensored trials".into()));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        let est = Self {
            mean,
            stderr,
            ci_level,
            trials_run,
            trials_censored: trials_run - n,
        };
        if let Some(d) = est.censoring_diagnostic() {
            log::warn!("{d}");
        }
        Ok(est)
    }

    pub fn censoring_rate(&self) -> f64 {
        self.trials_censored as f64 / self.trials_run as f64
    }

    pub fn censoring_diagnostic(&self) -> Option<String> {
        (self.censoring_rate() > CENSORING_WARN_FRACTION).then(|| {
            format!(
                "{} of {} trials censored ({:.1}%)",
                self.trials_censored,
                self.trials_run,
                100.0 * self.censoring_rate()
            )
        })
    }

    /// Normal-approximation half-width at `ci_level`.
    pub fn ci_half_width(&self) -> f64 {
        let z = Normal::standard().inverse_cdf(0.5 + 0.5 * self.ci_level);
        z * self.stderr
    }

    pub fn within(&self, value: f64, n_stderr: f64) -> bool {
        (self.mean - value).abs() <= n_stderr * self.stderr
    }
}

/// A Monte Carlo hop curve together with the per-point estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloCurve {
    pub curve: HopCurve,
    pub estimates: Vec<TrialEstimate>,
}

/// Monte Carlo `N(x + E[d]) - N(x)`. Not monotone in `x`, so kept apart
/// from [`HopCurve`].
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenNodeCurve {
    pub mean_hop: f64,
    pub x: Vec<f64>,
    pub estimates: Vec<TrialEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopMoments {
    pub mean: TrialEstimate,
    pub second_moment: TrialEstimate,
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty x grid".into()));
    }
    for &x in grid {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::Domain {
                name: "x",
                value: x,
                expected: "grid values must be finite and >= 0",
            });
        }
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("x grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Per-trial hop indices at which progress first exceeds each target, or
/// `None` for a censored trial. `targets` must be sorted ascending.
fn walk<F>(targets: &[f64], mut step: F) -> Result<Option<Vec<u32>>>
where
    F: FnMut() -> Result<f64>,
{
    let mut counts = Vec::with_capacity(targets.len());
    let mut hops = 0u32;
    while counts.len() < targets.len() {
        if hops >= MAX_HOPS {
            return Ok(None);
        }
        let progress = match step() {
            Ok(p) => p,
            Err(Error::DeadEnd { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        hops += 1;
        while counts.len() < targets.len() && progress > targets[counts.len()] {
            counts.push(hops);
        }
    }
    Ok(Some(counts))
}

fn run_trial(
    targets: &[f64],
    policy: RoutingPolicy,
    deployment: &Deployment,
    r_tx: f64,
    run: SeededRun,
) -> Result<Option<Vec<u32>>> {
    let reach = targets.last().copied().unwrap_or(0.0) + r_tx;
    let mut rng = run.rng();
    let lambda = deployment.lambda();
    match deployment.geometry() {
        Geometry::Line { length } => {
            let nodes = ppp::line_points(lambda, length.max(reach), &mut rng)?;
            let mut pos = 0.0;
            walk(targets, || {
                let i = route_next_hop_1d(pos, &nodes, policy, r_tx, &mut rng)?;
                pos = nodes[i];
                Ok(pos)
            })
        }
        Geometry::Sector {
            aop_theta,
            width,
            height,
        } => {
            let width = width.max(reach);
            let nodes = ppp::rect_points(lambda, width, height, &mut rng)?;
            let dest = Point::new(width, 0.0);
            let mut pos = Point::ORIGIN;
            walk(targets, || {
                let i = route_next_hop_2d(pos, dest, &nodes, policy, aop_theta, r_tx, &mut rng)?;
                pos = nodes[i];
                Ok(pos.norm())
            })
        }
    }
}

/// Hop counts for every trial at `targets` (any order, duplicates
/// allowed); returns `trials` rows, `None` where censored.
fn hop_counts(
    targets: &[f64],
    policy: RoutingPolicy,
    deployment: &Deployment,
    r_tx: f64,
    settings: &McSettings,
) -> Result<Vec<Option<Vec<u32>>>> {
    ensure_positive("r_tx", r_tx)?;
    settings.validate()?;
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| targets[a].total_cmp(&targets[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| targets[i]).collect();
    let rows = settings.run(|run| run_trial(&sorted, policy, deployment, r_tx, run));
    rows.into_iter()
        .map(|row| {
            Ok(row?.map(|c| {
                let mut out = vec![0; c.len()];
                for (k, &i) in order.iter().enumerate() {
                    out[i] = c[k];
                }
                out
            }))
        })
        .collect()
}

fn column_estimate(values: Vec<f64>, x: f64, settings: &McSettings) -> Result<TrialEstimate> {
    if values.is_empty() {
        return Err(Error::AllCensored { x });
    }
    TrialEstimate::from_values(&values, settings.trials, settings.ci_level)
}

fn curve_params(deployment: &Deployment, r_tx: f64) -> CurveParams {
    CurveParams {
        r_tx,
        lambda: Some(deployment.lambda()),
        aop_theta: match deployment.geometry() {
            Geometry::Sector { aop_theta, .. } => Some(aop_theta),
            Geometry::Line { .. } => None,
        },
    }
}

/// Monte Carlo `N(x)`: the mean index of the first hop whose progress from
/// the source strictly exceeds `x`. On a line shorter than
/// `max(x_grid) + r_tx` the deployment is extended so every target stays
/// reachable.
pub fn estimate_n(
    x_grid: &[f64],
    policy: RoutingPolicy,
    deployment: &Deployment,
    r_tx: f64,
    settings: &McSettings,
) -> Result<MonteCarloCurve> {
    validate_grid(x_grid)?;
    let rows = hop_counts(x_grid, policy, deployment, r_tx, settings)?;
    let estimates = x_grid
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let values = rows.iter().flatten().map(|c| c[j] as f64).collect();
            column_estimate(values, x, settings)
        })
        .collect::<Result<Vec<_>>>()?;
    let samples = x_grid
        .iter()
        .zip(&estimates)
        .map(|(&x, e)| HopSample {
            x,
            n: e.mean,
            stderr: Some(e.stderr),
        })
        .collect();
    Ok(MonteCarloCurve {
        curve: HopCurve::new(samples, HopMethod::MonteCarlo, curve_params(deployment, r_tx))?,
        estimates,
    })
}

/// Monte Carlo `N(x + E[d]) - N(x)`, with `E[d]` the policy's analytic
/// mean hop length.
pub fn estimate_hidden(
    x_grid: &[f64],
    policy: RoutingPolicy,
    deployment: &Deployment,
    r_tx: f64,
    settings: &McSettings,
) -> Result<HiddenNodeCurve> {
    validate_grid(x_grid)?;
    let mean_hop = analytic_mean_hop(policy, deployment, r_tx)?;
    let m = x_grid.len();
    let targets: Vec<f64> = x_grid.iter().copied().chain(x_grid.iter().map(|x| x + mean_hop)).collect();
    let rows = hop_counts(&targets, policy, deployment, r_tx, settings)?;
    let estimates = x_grid
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let values = rows
                .iter()
                .flatten()
                .map(|c| c[m + j] as f64 - c[j] as f64)
                .collect();
            column_estimate(values, x, settings)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HiddenNodeCurve {
        mean_hop,
        x: x_grid.to_vec(),
        estimates,
    })
}

/// Single-hop forward distances, one per trial, each from a fresh Poisson
/// window of radius `r_tx` ahead of the sender. Returns the distances of
/// uncensored trials (non-empty windows) in trial order.
pub fn single_hop_samples(
    policy: RoutingPolicy,
    deployment: &Deployment,
    r_tx: f64,
    settings: &McSettings,
) -> Result<Vec<f64>> {
    ensure_positive("r_tx", r_tx)?;
    settings.validate()?;
    let lambda = deployment.lambda();
    let geometry = deployment.geometry();
    let rows = settings.run(|run| -> Result<Option<f64>> {
        let mut rng = run.rng();
        let progress: Vec<f64> = match geometry {
            Geometry::Line { .. } => ppp::line_points(lambda, r_tx, &mut rng)?,
            Geometry::Sector { aop_theta, .. } => ppp::sector_points(lambda, aop_theta, r_tx, &mut rng)?
                .into_iter()
                .map(|p| p.radius)
                .collect(),
        };
        Ok(choose_candidate(&progress, policy, &mut rng).map(|i| progress[i]))
    });
    rows.into_iter()
        .filter_map(|r| r.transpose())
        .collect::<Result<Vec<_>>>()
}

/// Empirical first and second moments of the single-hop distance.
pub fn estimate_hop_moments(
    policy: RoutingPolicy,
    deployment: &Deployment,
    r_tx: f64,
    settings: &McSettings,
) -> Result<HopMoments> {
    let d = single_hop_samples(policy, deployment, r_tx, settings)?;
    if d.is_empty() {
        return Err(Error::AllCensored { x: 0.0 });
    }
    let sq: Vec<f64> = d.iter().map(|v| v * v).collect();
    Ok(HopMoments {
        mean: TrialEstimate::from_values(&d, settings.trials, settings.ci_level)?,
        second_moment: TrialEstimate::from_values(&sq, settings.trials, settings.ci_level)?,
    })
}
