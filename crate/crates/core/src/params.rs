//! Radio and deployment parameters shared by every module.

use std::fmt;
use std::str::FromStr;

use log::warn;

use crate::error::{ensure_positive, Error, Result};

/// Ranges in meters, capacity in bit/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    r_tx: f64,
    r_i: f64,
    r_cs: f64,
    capacity_c: f64,
    airtime_fraction_a: f64,
}

impl RadioParams {
    /// Fails unless `0 < r_tx <= r_i <= r_cs`, `capacity_c > 0` and
    /// `0 < a <= 1`. The usual 802.11 ordering `r_tx < r_i < 2 r_tx <= r_cs`
    /// is only checked softly: a violation is logged, not rejected.
    pub fn new(r_tx: f64, r_i: f64, r_cs: f64, capacity_c: f64, airtime_fraction_a: f64) -> Result<Self> {
        ensure_positive("r_tx", r_tx)?;
        ensure_positive("capacity_c", capacity_c)?;
        if !(r_tx <= r_i && r_i <= r_cs) || !r_cs.is_finite() {
            return Err(Error::InvalidParams(format!(
                "ranges must satisfy r_tx <= r_i <= r_cs (got r_tx={r_tx}, r_i={r_i}, r_cs={r_cs})"
            )));
        }
        if !(airtime_fraction_a > 0.0 && airtime_fraction_a <= 1.0) {
            return Err(Error::Domain {
                name: "airtime_fraction_a",
                value: airtime_fraction_a,
                expected: "must lie in (0, 1]",
            });
        }
        let params = Self {
            r_tx,
            r_i,
            r_cs,
            capacity_c,
            airtime_fraction_a,
        };
        if let Some(msg) = params.ordering_warning() {
            warn!("{msg}");
        }
        Ok(params)
    }

    /// Describes a violation of `r_tx < r_i < 2 r_tx <= r_cs`, if any.
    pub fn ordering_warning(&self) -> Option<String> {
        let ok = self.r_tx < self.r_i && self.r_i < 2.0 * self.r_tx && 2.0 * self.r_tx <= self.r_cs;
        (!ok).then(|| {
            format!(
                "radio ranges deviate from the usual r_tx < r_i < 2 r_tx <= r_cs ordering \
                 (r_tx={}, r_i={}, r_cs={})",
                self.r_tx, self.r_i, self.r_cs
            )
        })
    }

    pub fn r_tx(&self) -> f64 {
        self.r_tx
    }
    pub fn r_i(&self) -> f64 {
        self.r_i
    }
    pub fn r_cs(&self) -> f64 {
        self.r_cs
    }
    pub fn capacity_c(&self) -> f64 {
        self.capacity_c
    }
    pub fn airtime_fraction_a(&self) -> f64 {
        self.airtime_fraction_a
    }

    /// Copy with a different airtime fraction.
    pub fn with_airtime_fraction(&self, a: f64) -> Result<Self> {
        Self::new(self.r_tx, self.r_i, self.r_cs, self.capacity_c, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// A line segment starting at the source.
    Line { length: f64 },
    /// A `width x height` rectangle; the source sits at the middle of the
    /// left edge and the destination at the middle of the right edge. Next
    /// hops are picked in a sector of angle `aop_theta` aimed at the
    /// destination.
    Sector { aop_theta: f64, width: f64, height: f64 },
}

/// Node density (nodes/m on a line, nodes/m² in the plane) plus geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment {
    lambda: f64,
    geometry: Geometry,
}

impl Deployment {
    pub fn new(lambda: f64, geometry: Geometry) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        match geometry {
            Geometry::Line { length } => ensure_positive("length", length)?,
            Geometry::Sector {
                aop_theta,
                width,
                height,
            } => {
                if !(aop_theta > 0.0 && aop_theta <= std::f64::consts::PI) {
                    return Err(Error::Domain {
                        name: "aop_theta",
                        value: aop_theta,
                        expected: "must lie in (0, pi]",
                    });
                }
                ensure_positive("width", width)?;
                ensure_positive("height", height)?;
            }
        }
        Ok(Self { lambda, geometry })
    }

    pub fn line(lambda: f64, length: f64) -> Result<Self> {
        Self::new(lambda, Geometry::Line { length })
    }

    pub fn sector(lambda: f64, aop_theta: f64, width: f64, height: f64) -> Result<Self> {
        Self::new(
            lambda,
            Geometry::Sector {
                aop_theta,
                width,
                height,
            },
        )
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoutingPolicy {
    /// Uniform choice among the forward neighbors in range.
    RandomNeighbor,
    /// The forward neighbor in range that makes the most progress.
    FurthestNeighbor,
}

impl fmt::Display for RoutingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoutingPolicy::RandomNeighbor => "random",
            RoutingPolicy::FurthestNeighbor => "furthest",
        })
    }
}

impl FromStr for RoutingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(RoutingPolicy::RandomNeighbor),
            "furthest" => Ok(RoutingPolicy::FurthestNeighbor),
            other => Err(Error::InvalidParams(format!(
                "unknown routing policy {other:?} (expected random or furthest)"
            ))),
        }
    }
}
