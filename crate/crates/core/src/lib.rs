//! Capacity analysis for single-flow multi-hop 802.11 chains over randomly
//! deployed nodes.
//!
//! - [`analytic`]: expected hop counts `N(x)` for random- and
//!   furthest-neighbor routing, exact on a line and linearized in the plane.
//! - [`throughput`]: perfect-MAC and 802.11-aware maximum end-to-end
//!   throughput built on those hop counts.
//! - [`simulate`]: a seeded Monte Carlo oracle over Poisson deployments.
//! - [`timing`]: 802.11 frame timing used to derive the data airtime
//!   fraction.

// Negated comparisons reject NaN inputs along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod numeric;
pub mod params;
pub mod simulate;
pub mod throughput;
pub mod timing;

pub use error::{Error, Result};
pub use params::{Deployment, Geometry, RadioParams, RoutingPolicy};
