use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::SeededRun;
use crate::error::{ensure_positive, Error, Result};

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Polar coordinates relative to a sector's apex and axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub radius: f64,
    pub angle: f64,
}

pub(crate) fn poisson_count<R: Rng>(mean: f64, rng: &mut R) -> Result<usize> {
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidParams(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

pub(crate) fn line_points<R: Rng>(lambda: f64, length: f64, rng: &mut R) -> Result<Vec<f64>> {
    ensure_positive("lambda", lambda)?;
    ensure_positive("length", length)?;
    let n = poisson_count(lambda * length, rng)?;
    let mut pts: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * length).collect();
    pts.sort_by(f64::total_cmp);
    Ok(pts)
}

pub(crate) fn sector_points<R: Rng>(lambda: f64, theta: f64, radius: f64, rng: &mut R) -> Result<Vec<Polar>> {
    ensure_positive("lambda", lambda)?;
    ensure_positive("radius", radius)?;
    check_theta(theta)?;
    let n = poisson_count(lambda * 0.5 * theta * radius * radius, rng)?;
    Ok((0..n)
        .map(|_| Polar {
            radius: radius * rng.random::<f64>().sqrt(),
            angle: theta * (rng.random::<f64>() - 0.5),
        })
        .collect())
}

pub(crate) fn rect_points<R: Rng>(lambda: f64, width: f64, height: f64, rng: &mut R) -> Result<Vec<Point>> {
    ensure_positive("lambda", lambda)?;
    ensure_positive("width", width)?;
    ensure_positive("height", height)?;
    let n = poisson_count(lambda * width * height, rng)?;
    Ok((0..n)
        .map(|_| Point {
            x: rng.random::<f64>() * width,
            y: (rng.random::<f64>() - 0.5) * height,
        })
        .collect())
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= std::f64::consts::PI {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "theta",
            value: theta,
            expected: "must lie in (0, pi]",
        })
    }
}

/// Homogeneous Poisson points on `[0, length]`, sorted ascending.
pub fn sample_ppp_1d(lambda: f64, length: f64, run: SeededRun) -> Result<Vec<f64>> {
    line_points(lambda, length, &mut run.rng())
}

/// Homogeneous Poisson points in a sector of angle `theta` and radius
/// `radius`, angles measured from the sector axis.
pub fn sample_ppp_sector(lambda: f64, theta: f64, radius: f64, run: SeededRun) -> Result<Vec<Polar>> {
    sector_points(lambda, theta, radius, &mut run.rng())
}

/// Homogeneous Poisson points in `[0, width] x [-height/2, height/2]`.
pub fn sample_ppp_rect(lambda: f64, width: f64, height: f64, run: SeededRun) -> Result<Vec<Point>> {
    rect_points(lambda, width, height, &mut run.rng())
}
