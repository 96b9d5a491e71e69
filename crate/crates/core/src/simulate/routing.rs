use rand::Rng;

use super::ppp::Point;
use crate::error::{Error, Result};
use crate::params::RoutingPolicy;

/// Picks among candidates with the given forward progress: uniformly for
/// random routing, the largest progress (lowest index on ties) for
/// furthest routing. `None` when there are no candidates.
pub fn choose_candidate<R: Rng>(progress: &[f64], policy: RoutingPolicy, rng: &mut R) -> Option<usize> {
    if progress.is_empty() {
        return None;
    }
    Some(match policy {
        RoutingPolicy::RandomNeighbor => rng.random_range(0..progress.len()),
        RoutingPolicy::FurthestNeighbor => {
            let mut best = 0;
            for (i, &p) in progress.iter().enumerate().skip(1) {
                if p > progress[best] {
                    best = i;
                }
            }
            best
        }
    })
}

/// Next hop on a line: the index into the sorted `nodes` of the chosen
/// node in `(current, current + r_tx]`.
pub fn route_next_hop_1d<R: Rng>(
    current: f64,
    nodes: &[f64],
    policy: RoutingPolicy,
    r_tx: f64,
    rng: &mut R,
) -> Result<usize> {
    let lo = nodes.partition_point(|&p| p <= current);
    let hi = nodes.partition_point(|&p| p <= current + r_tx);
    let window = &nodes[lo..hi];
    let pick = match policy {
        // sorted, so the furthest is the first node equal to the last
        RoutingPolicy::FurthestNeighbor if !window.is_empty() => {
            let max = window[window.len() - 1];
            Some(window.partition_point(|&p| p < max))
        }
        _ => choose_candidate(window, policy, rng),
    };
    pick.map(|i| lo + i).ok_or(Error::DeadEnd { position: current })
}

/// Whether `node` lies within `r_tx` of `current` and inside the sector of
/// angle `theta` whose axis points from `current` to `dest`.
pub fn in_sector(current: Point, dest: Point, node: Point, theta: f64, r_tx: f64) -> bool {
    let (dx, dy) = (node.x - current.x, node.y - current.y);
    let d = dx.hypot(dy);
    if !(d > 0.0 && d <= r_tx) {
        return false;
    }
    let (ax, ay) = (dest.x - current.x, dest.y - current.y);
    let angle = (ax * dy - ay * dx).atan2(ax * dx + ay * dy);
    angle.abs() <= 0.5 * theta
}

/// Next hop in the plane: the index into `nodes` of the node chosen among
/// those in the sector towards `dest`. Furthest routing maximizes the
/// distance from `current`.
pub fn route_next_hop_2d<R: Rng>(
    current: Point,
    dest: Point,
    nodes: &[Point],
    policy: RoutingPolicy,
    theta: f64,
    r_tx: f64,
    rng: &mut R,
) -> Result<usize> {
    let (idx, progress): (Vec<usize>, Vec<f64>) = nodes
        .iter()
        .enumerate()
        .filter(|(_, &p)| in_sector(current, dest, p, theta, r_tx))
        .map(|(i, &p)| (i, current.dist(p)))
        .unzip();
    choose_candidate(&progress, policy, rng)
        .map(|i| idx[i])
        .ok_or(Error::DeadEnd {
            position: current.norm(),
        })
}
