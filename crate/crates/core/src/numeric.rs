//! Small numerical kernels: compensated summation, adaptive Simpson
//! quadrature and bracketed bisection.

use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation. Keeps a running compensation term
/// so alternating series with large intermediate terms lose far less
/// precision than a naive fold.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for term in iter {
            acc.add(term);
        }
        acc
    }
}

const SIMPSON_MAX_DEPTH: u32 = 60;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol`. Fails with [`Error::NoConvergence`] when the recursion depth is
/// exhausted before the local error estimate drops below tolerance.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    // A coarse scale estimate turns the relative tolerance into an absolute
    // one per panel.
    let coarse: f64 = (0..=64)
        .map(|i| f(a + (b - a) * i as f64 / 64.0).abs())
        .sum::<f64>()
        * (b - a).abs()
        / 65.0;
    let abs_tol = rel_tol * coarse.max(whole.abs()).max(f64::MIN_POSITIVE);

    let mut worst = 0.0f64;
    let value = simpson_step(&f, a, b, fa, fm, fb, whole, abs_tol, SIMPSON_MAX_DEPTH, &mut worst);
    if worst > abs_tol {
        return Err(Error::NoConvergence {
            what: "adaptive Simpson quadrature",
            achieved: worst / value.abs().max(f64::MIN_POSITIVE),
        });
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *worst = worst.max(delta.abs() / 15.0);
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst)
}

/// Bisection for a root of `f` in `[lo, hi]`; requires a sign change.
/// Stops once the bracket is narrower than `abs_tol + rel_tol * |mid|`.
pub fn bisect<F>(
    what: &'static str,
    f: F,
    mut lo: f64,
    mut hi: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoRoot { what, lo, hi });
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= abs_tol + rel_tol * mid.abs() {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
