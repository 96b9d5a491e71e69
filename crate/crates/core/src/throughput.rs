//! End-to-end throughput of a single multi-hop flow.
//!
//! With a perfect MAC the source can inject a new packet once the previous
//! one has left the interference range of the next hop, so
//! `T_max = C / (1 + N(R_i))`. Under 802.11 carrier sensing the packet must
//! leave the carrier-sense range instead, and hidden-node collisions cost
//! retransmissions: `T_max = (1 - P_col) C / (1 + N(R_cs))`.

use crate::analytic::HopFunction;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::numeric::bisect;
use crate::params::RadioParams;

const FIXED_POINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacModel {
    PerfectMac,
    Mac80211,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputResult {
    pub offered_rate_r: f64,
    /// `r / C`.
    pub airtime_x: f64,
    /// `None` once the collision model is undefined (saturated channel).
    pub p_col: Option<f64>,
    /// `N(d_i + R_cs) - N(d_i)`; zero under the perfect MAC.
    pub contending_hops: f64,
    /// `N(R_i)` (perfect MAC) or `N(R_cs)` (802.11).
    pub blocking_hops: f64,
    pub throughput: f64,
    pub model: MacModel,
    /// Set when the offered rate exceeds the model's maximum, where the
    /// collision model is known to overestimate collisions.
    pub beyond_validity: bool,
}

/// `C / (1 + N(R_i))`.
pub fn t_max_perfect(capacity_c: f64, hops_blocking: f64) -> Result<f64> {
    ensure_positive("capacity_c", capacity_c)?;
    ensure_non_negative("hops_blocking", hops_blocking)?;
    Ok(capacity_c / (1.0 + hops_blocking))
}

/// `min{r, C / (1 + N(R_i))}`.
pub fn t_of_r_perfect(r: f64, capacity_c: f64, hops_blocking: f64) -> Result<ThroughputResult> {
    ensure_non_negative("r", r)?;
    let t_max = t_max_perfect(capacity_c, hops_blocking)?;
    let airtime_x = r / capacity_c;
    if airtime_x > 1.0 {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "must not exceed the single-hop capacity",
        });
    }
    Ok(ThroughputResult {
        offered_rate_r: r,
        airtime_x,
        p_col: Some(0.0),
        contending_hops: 0.0,
        blocking_hops: hops_blocking,
        throughput: r.min(t_max),
        model: MacModel::PerfectMac,
        beyond_validity: r > t_max,
    })
}

/// Hidden-node collision probability `a x / (1 - K x)` for normalized
/// airtime `x` and `K` contending hops.
pub fn p_col(airtime_x: f64, a: f64, contending_hops: f64) -> Result<f64> {
    ensure_non_negative("airtime_x", airtime_x)?;
    ensure_non_negative("contending_hops", contending_hops)?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain {
            name: "a",
            value: a,
            expected: "must lie in (0, 1]",
        });
    }
    let denom = 1.0 - contending_hops * airtime_x;
    if denom <= 0.0 {
        return Err(Error::Saturated {
            contending: contending_hops,
            airtime: airtime_x,
        });
    }
    Ok(a * airtime_x / denom)
}

/// `N(d_i + R_cs) - N(d_i)`: forwarding nodes within carrier-sense range of
/// both a sender at `d_i` and its hidden node.
pub fn contending_hops(hop_fn: &dyn HopFunction, d_i: f64, r_cs: f64) -> Result<f64> {
    ensure_non_negative("d_i", d_i)?;
    ensure_positive("r_cs", r_cs)?;
    Ok(hop_fn.hops(d_i + r_cs)? - hop_fn.hops(d_i)?)
}

/// `N(x + E[d]) - N(x)`: expected forwarding nodes in a window one mean
/// hop long, i.e. in the hidden-node area.
pub fn hidden_node_expected(x: f64, mean_hop: f64, hop_fn: &dyn HopFunction) -> Result<f64> {
    ensure_non_negative("x", x)?;
    ensure_positive("mean_hop", mean_hop)?;
    Ok(hop_fn.hops(x + mean_hop)? - hop_fn.hops(x)?)
}

/// The 802.11 operating point together with the quantities behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacFixedPoint {
    pub result: ThroughputResult,
    /// `|x* - (1 - P_col(x*)) / (1 + N(R_cs))|`.
    pub residual: f64,
    /// Upper end of the airtime bracket searched.
    pub bracket_hi: f64,
}

struct MacInputs {
    a: f64,
    capacity: f64,
    blocking: f64,
    contending: f64,
}

impl MacInputs {
    fn new(params: &RadioParams, hop_fn: &dyn HopFunction) -> Result<Self> {
        Ok(Self {
            a: params.airtime_fraction_a(),
            capacity: params.capacity_c(),
            blocking: hop_fn.hops(params.r_cs())?,
            contending: contending_hops(hop_fn, 0.0, params.r_cs())?,
        })
    }

    fn bracket_hi(&self) -> f64 {
        if self.contending > 1.0 {
            1.0 / self.contending
        } else {
            1.0
        }
    }

    /// `x - (1 - P_col(x)) / (1 + N(R_cs))`, increasing in `x`.
    fn gap(&self, x: f64) -> f64 {
        match p_col(x, self.a, self.contending) {
            Ok(p) => x - (1.0 - p) / (1.0 + self.blocking),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Solves `x* = (1 - P_col(x*)) / (1 + N(R_cs))` by bisection (collision
/// probability evaluated for the first node, `d_i = 0`) and returns
/// `T_max = x* C`.
pub fn t_max_mac(params: &RadioParams, hop_fn: &dyn HopFunction) -> Result<MacFixedPoint> {
    let inputs = MacInputs::new(params, hop_fn)?;
    let hi = inputs.bracket_hi();
    let x_star = bisect("802.11 airtime fixed point", |x| inputs.gap(x), 0.0, hi, FIXED_POINT_TOL, 0.0)?;
    let p = p_col(x_star, inputs.a, inputs.contending)?;
    let residual = (x_star - (1.0 - p) / (1.0 + inputs.blocking)).abs();
    let throughput = x_star * inputs.capacity;
    Ok(MacFixedPoint {
        result: ThroughputResult {
            offered_rate_r: throughput,
            airtime_x: x_star,
            p_col: Some(p),
            contending_hops: inputs.contending,
            blocking_hops: inputs.blocking,
            throughput,
            model: MacModel::Mac80211,
            beyond_validity: false,
        },
        residual,
        bracket_hi: hi,
    })
}

/// Served rate at offered rate `r`:
/// `min{r, (1 - P_col(r/C)) C / (1 + N(R_cs))}`. Rates above the fixed
/// point are flagged beyond validity; when the collision model is
/// undefined (`K r/C >= 1`) `p_col` is `None` and the throughput is zero.
pub fn t_of_r_mac(r: f64, params: &RadioParams, hop_fn: &dyn HopFunction) -> Result<ThroughputResult> {
    ensure_non_negative("r", r)?;
    let inputs = MacInputs::new(params, hop_fn)?;
    let fixed = t_max_mac(params, hop_fn)?;
    let airtime_x = r / inputs.capacity;
    let beyond = r > fixed.result.throughput;
    let (p, throughput) = match p_col(airtime_x, inputs.a, inputs.contending) {
        Ok(p) if p < 1.0 => {
            let served = (1.0 - p) * inputs.capacity / (1.0 + inputs.blocking);
            // below the fixed point the served rate exceeds r up to the
            // bisection tolerance
            let t = if beyond { r.min(served) } else { r };
            (Some(p), t)
        }
        Ok(p) => (Some(p), 0.0),
        Err(Error::Saturated { .. }) => (None, 0.0),
        Err(e) => return Err(e),
    };
    Ok(ThroughputResult {
        offered_rate_r: r,
        airtime_x,
        p_col: p.filter(|p| *p < 1.0),
        contending_hops: inputs.contending,
        blocking_hops: inputs.blocking,
        throughput,
        model: MacModel::Mac80211,
        beyond_validity: beyond,
    })
}
