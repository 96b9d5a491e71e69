//! Kolmogorov–Smirnov checks of sampled distances against their laws.

use std::f64::consts::PI;

use hopcap::simulate::{sample_ppp_sector, single_hop_samples, McSettings, SeededRun};
use hopcap::{Deployment, RoutingPolicy};

const R: f64 = 250.0;
/// Asymptotic KS critical value at the 1% level, scaled by sqrt(n).
const KS_CRIT_1PCT: f64 = 1.628;

fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn assert_fits(samples: Vec<f64>, cdf: impl Fn(f64) -> f64, label: &str) {
    let n = samples.len();
    let d = ks_statistic(samples, cdf);
    let crit = KS_CRIT_1PCT / (n as f64).sqrt();
    assert!(d < crit, "{label}: D={d:.4} >= {crit:.4} over {n} samples");
}

#[test]
fn random_hop_length_is_uniform() {
    let dep = Deployment::line(0.04, 1250.0).unwrap();
    let d = single_hop_samples(RoutingPolicy::RandomNeighbor, &dep, R, &McSettings::new(20_000, 3)).unwrap();
    assert_fits(d, |x| x / R, "uniform hop");
}

#[test]
fn furthest_hop_length_follows_truncated_exponential() {
    for lambda in [0.01, 0.04] {
        let dep = Deployment::line(lambda, 1250.0).unwrap();
        let d = single_hop_samples(RoutingPolicy::FurthestNeighbor, &dep, R, &McSettings::new(50_000, 9)).unwrap();
        let denom = (lambda * R).exp_m1();
        assert_fits(d, |x| (lambda * x).exp_m1() / denom, "furthest hop");
    }
}

#[test]
fn sector_points_are_uniform_in_area() {
    let theta = PI / 3.0;
    let mut radii = Vec::new();
    let mut angles = Vec::new();
    for trial in 0..400 {
        for p in sample_ppp_sector(0.002, theta, R, SeededRun::new(11, trial)).unwrap() {
            radii.push(p.radius);
            angles.push(p.angle);
        }
    }
    assert!(radii.len() > 10_000);
    assert_fits(radii, |r| (r / R).powi(2), "sector radius");
    assert_fits(angles, |a| a / theta + 0.5, "sector angle");
}

#[test]
fn planar_random_hop_matches_area_law() {
    let dep = Deployment::sector(0.0002, PI / 3.0, 2000.0, 1000.0).unwrap();
    let d = single_hop_samples(RoutingPolicy::RandomNeighbor, &dep, R, &McSettings::new(20_000, 7)).unwrap();
    assert_fits(d, |r| (r / R).powi(2), "planar random hop");
}
