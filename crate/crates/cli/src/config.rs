//! Run configuration: built-in defaults, overridden by an optional TOML
//! file, overridden by command-line flags. File keys use the flag names.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use hopcap::timing::Dot11Timing;
use hopcap::{Deployment, RadioParams, RoutingPolicy};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "hopcap", version, about = "Hop-count and end-to-end throughput analysis for multi-hop 802.11 chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected hops N(x): closed form, linear approximation, gamma baseline and Monte Carlo.
    Hopcurve(CommonArgs),
    /// Forwarding nodes in the hidden-node window, N(x + E[d]) - N(x).
    Hidden(CommonArgs),
    /// Single-hop distance moments: analytic and Monte Carlo.
    Moments(CommonArgs),
    /// Served end-to-end rate for each offered rate, perfect MAC and 802.11.
    Throughput(CommonArgs),
    /// Runs the numerical invariant suite and reports PASS/FAIL per check.
    Validate(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Hopcurve(_) => "hopcurve",
            Command::Hidden(_) => "hidden",
            Command::Moments(_) => "moments",
            Command::Throughput(_) => "throughput",
            Command::Validate(_) => "validate",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Hopcurve(a)
            | Command::Hidden(a)
            | Command::Moments(a)
            | Command::Throughput(a)
            | Command::Validate(a) => a,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Routing policy: random or furthest.
    #[arg(long)]
    pub policy: Option<RoutingPolicy>,
    /// Deployment dimension.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: Option<u8>,
    /// Node density (nodes/m on a line, nodes/m^2 in the plane).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Angle of progression in degrees (2-D).
    #[arg(long)]
    pub aop_deg: Option<f64>,
    /// Line length in meters (1-D).
    #[arg(long)]
    pub length: Option<f64>,
    /// Region width in meters (2-D).
    #[arg(long)]
    pub width: Option<f64>,
    /// Region height in meters (2-D).
    #[arg(long)]
    pub height: Option<f64>,
    /// Transmission range in meters.
    #[arg(long)]
    pub rtx: Option<f64>,
    /// Interference range in meters.
    #[arg(long)]
    pub ri: Option<f64>,
    /// Carrier-sense range in meters.
    #[arg(long)]
    pub rcs: Option<f64>,
    /// Single-hop capacity in bit/s.
    #[arg(long)]
    pub capacity: Option<f64>,
    /// Fraction of an exchange occupied by the data frame.
    #[arg(long)]
    pub airtime_a: Option<f64>,
    /// Derive the airtime fraction from 802.11b frame timing.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub derive_a: Option<bool>,
    /// Payload size in bytes used when deriving the airtime fraction.
    #[arg(long)]
    pub payload_bytes: Option<f64>,
    /// PHY data rate in bit/s used when deriving the airtime fraction.
    #[arg(long)]
    pub data_rate: Option<f64>,
    /// Largest x of the grid in meters.
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Grid spacing in meters; the grid is xstep, 2 xstep, ..., <= xmax.
    #[arg(long)]
    pub xstep: Option<f64>,
    /// Offered rates in bit/s, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    /// Monte Carlo trials per estimate.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed of the Monte Carlo streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Confidence level reported with Monte Carlo estimates.
    #[arg(long)]
    pub ci: Option<f64>,
    /// Multiplier applied to every validation tolerance.
    #[arg(long)]
    pub tol_scale: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    radio: RadioSection,
    deployment: DeploymentSection,
    routing: RoutingSection,
    run: RunSection,
    validate: ValidateSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct RadioSection {
    rtx: Option<f64>,
    ri: Option<f64>,
    rcs: Option<f64>,
    capacity: Option<f64>,
    airtime_a: Option<f64>,
    derive_a: Option<bool>,
    payload_bytes: Option<f64>,
    data_rate: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct DeploymentSection {
    dim: Option<u8>,
    lambda: Option<f64>,
    aop_deg: Option<f64>,
    length: Option<f64>,
    width: Option<f64>,
    height: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct RoutingSection {
    policy: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct RunSection {
    xmax: Option<f64>,
    xstep: Option<f64>,
    rates: Option<Vec<f64>>,
    trials: Option<usize>,
    seed: Option<u64>,
    ci: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct ValidateSection {
    tol_scale: Option<f64>,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub policy: RoutingPolicy,
    pub dim: u8,
    pub lambda: f64,
    pub aop_deg: f64,
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub radio: RadioParams,
    /// How the airtime fraction was set: "given" or "derived".
    pub airtime_source: &'static str,
    pub deployment: Deployment,
    pub xmax: f64,
    pub xstep: f64,
    pub rates: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub ci: f64,
    pub tol_scale: f64,
    pub out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: &Command) -> Result<Self, CliError> {
        let name = command.name();
        let a = command.args();
        let f = match &a.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };

        let policy = match (&a.policy, &f.routing.policy) {
            (Some(p), _) => *p,
            (None, Some(s)) => s.parse().map_err(|e| usage(format!("policy: {e}")))?,
            (None, None) => RoutingPolicy::RandomNeighbor,
        };
        let dim = a.dim.or(f.deployment.dim).unwrap_or(1);
        if !(1..=2).contains(&dim) {
            return Err(usage(format!("dim must be 1 or 2, got {dim}")));
        }
        let default_lambda = if dim == 1 { 0.4 } else { 0.0002 };
        let lambda = a.lambda.or(f.deployment.lambda).unwrap_or(default_lambda);
        let aop_deg = a.aop_deg.or(f.deployment.aop_deg).unwrap_or(60.0);
        let default_length = match name {
            "hopcurve" | "hidden" | "moments" => 1250.0,
            _ => 2000.0,
        };
        let length = a.length.or(f.deployment.length).unwrap_or(default_length);
        let width = a.width.or(f.deployment.width).unwrap_or(2000.0);
        let height = a.height.or(f.deployment.height).unwrap_or(1000.0);

        let r = &f.radio;
        let rtx = a.rtx.or(r.rtx).unwrap_or(250.0);
        let ri = a.ri.or(r.ri).unwrap_or(450.0);
        let rcs = a.rcs.or(r.rcs).unwrap_or(500.0);
        let capacity = a.capacity.or(r.capacity).unwrap_or(0.87e6);
        let given_a = a.airtime_a.or(r.airtime_a);
        let derive_a = a.derive_a.or(r.derive_a).unwrap_or(false);
        let (airtime_a, airtime_source) = match (given_a, derive_a) {
            (Some(_), true) => return Err(usage("airtime-a and derive-a are mutually exclusive")),
            (Some(v), false) => (v, "given"),
            (None, _) => {
                let defaults = Dot11Timing::default();
                let timing = Dot11Timing {
                    payload_bytes: a.payload_bytes.or(r.payload_bytes).unwrap_or(defaults.payload_bytes),
                    data_rate_bps: a.data_rate.or(r.data_rate).unwrap_or(defaults.data_rate_bps),
                    ..defaults
                };
                let v = timing.airtime_fraction().map_err(|e| usage(e.to_string()))?;
                (v, "derived")
            }
        };
        let radio = RadioParams::new(rtx, ri, rcs, capacity, airtime_a).map_err(|e| usage(e.to_string()))?;

        let deployment = if dim == 1 {
            Deployment::line(lambda, length)
        } else {
            Deployment::sector(lambda, aop_deg.to_radians(), width, height)
        }
        .map_err(|e| usage(e.to_string()))?;

        let ru = &f.run;
        let xmax = a.xmax.or(ru.xmax).unwrap_or(1250.0);
        let xstep = a.xstep.or(ru.xstep).unwrap_or(125.0);
        let rates = a
            .rates
            .clone()
            .or_else(|| ru.rates.clone())
            .unwrap_or_else(|| (1..=30).map(|k| k as f64 * 10_000.0).collect());
        let default_trials = if name == "throughput" { 1000 } else { 2000 };
        let trials = a.trials.or(ru.trials).unwrap_or(default_trials);
        let seed = a.seed.or(ru.seed).unwrap_or(1);
        let ci = a.ci.or(ru.ci).unwrap_or(0.99);
        let tol_scale = a.tol_scale.or(f.validate.tol_scale).unwrap_or(1.0);
        let out = a.out.clone().or_else(|| ru.out.clone());

        if trials < 2 {
            return Err(usage(format!("trials must be at least 2, got {trials}")));
        }
        if !(ci > 0.0 && ci < 1.0) {
            return Err(usage(format!("ci must lie in (0, 1), got {ci}")));
        }
        if !(tol_scale > 0.0 && tol_scale.is_finite()) {
            return Err(usage(format!("tol-scale must be positive, got {tol_scale}")));
        }

        Ok(Self {
            command: name,
            policy,
            dim,
            lambda,
            aop_deg,
            length,
            width,
            height,
            radio,
            airtime_source,
            deployment,
            xmax,
            xstep,
            rates,
            trials,
            seed,
            ci,
            tol_scale,
            out,
        })
    }

    /// `xstep, 2 xstep, ...` up to `xmax`.
    pub fn x_grid(&self) -> Result<Vec<f64>, CliError> {
        if !(self.xstep > 0.0 && self.xstep.is_finite() && self.xmax.is_finite()) {
            return Err(usage(format!("invalid grid: xstep={} xmax={}", self.xstep, self.xmax)));
        }
        let n = (self.xmax / self.xstep + 1e-9).floor();
        if n < 1.0 {
            return Err(usage(format!("empty grid: xmax={} < xstep={}", self.xmax, self.xstep)));
        }
        Ok((1..=n as usize).map(|k| k as f64 * self.xstep).collect())
    }

    pub fn rate_grid(&self) -> Result<&[f64], CliError> {
        if self.rates.is_empty() {
            return Err(usage("empty rate grid"));
        }
        let c = self.radio.capacity_c();
        if let Some(r) = self.rates.iter().find(|&&r| !(r >= 0.0 && r <= c)) {
            return Err(usage(format!("rate {r} outside [0, capacity = {c}]")));
        }
        Ok(&self.rates)
    }

    pub fn mc_settings(&self) -> hopcap::simulate::McSettings {
        hopcap::simulate::McSettings {
            trials: self.trials,
            master_seed: self.seed,
            ci_level: self.ci,
        }
    }

    /// One comment line with every effective setting except file paths.
    pub fn header_line(&self) -> String {
        let p = &self.radio;
        let mut s = format!("# hopcap {} {}", env!("CARGO_PKG_VERSION"), self.command);
        let rates: Vec<String> = self.rates.iter().map(|r| r.to_string()).collect();
        let _ = write!(
            s,
            " policy={} dim={} lambda={} aop-deg={} length={} width={} height={} rtx={} ri={} rcs={} capacity={} \
             airtime-a={} ({}) xmax={} xstep={} rates={} trials={} seed={} ci={} tol-scale={}",
            self.policy,
            self.dim,
            self.lambda,
            self.aop_deg,
            self.length,
            self.width,
            self.height,
            p.r_tx(),
            p.r_i(),
            p.r_cs(),
            p.capacity_c(),
            p.airtime_fraction_a(),
            self.airtime_source,
            self.xmax,
            self.xstep,
            rates.join(";"),
            self.trials,
            self.seed,
            self.ci,
            self.tol_scale,
        );
        s
    }
}
