use crate::analytic::{HopFunction, HopMethod};
use crate::error::{ensure_positive, Error, Result};

/// Linear hop-count approximation for i.i.d. hop lengths `Y`:
/// `x / E[Y] + E[Y^2] / (2 E[Y]^2)`.
pub fn linear_approx(x: f64, moment1: f64, moment2: f64) -> Result<f64> {
    check_moments(moment1, moment2)?;
    Ok(x / moment1 + moment2 / (2.0 * moment1 * moment1))
}

fn check_moments(moment1: f64, moment2: f64) -> Result<()> {
    ensure_positive("moment1", moment1)?;
    // allow for rounding when the distribution is (nearly) degenerate
    if !(moment2 >= moment1 * moment1 * (1.0 - 1e-12)) {
        return Err(Error::Domain {
            name: "moment2",
            value: moment2,
            expected: "must be >= moment1^2",
        });
    }
    Ok(())
}

/// Mean and second moment of a uniform hop on `[0, r_tx]`.
pub fn uniform_moments(r_tx: f64) -> Result<(f64, f64)> {
    ensure_positive("r_tx", r_tx)?;
    Ok((r_tx / 2.0, r_tx * r_tx / 3.0))
}

/// Mean and second moment of the distance to the furthest of a Poisson
/// number (at least one) of nodes in `(0, R]`, whose density is
/// `lambda e^{lambda x} / (e^{lambda R} - 1)`.
pub fn furthest_moments_1d(lambda: f64, r_tx: f64) -> Result<(f64, f64)> {
    ensure_positive("lambda", lambda)?;
    ensure_positive("r_tx", r_tx)?;
    let u = lambda * r_tx;
    let one_minus_q = -(-u).exp_m1();
    // mean = (e^{-u} + u - 1) / (lambda (1 - e^{-u}))
    let mean = r_tx * excess_exp(u) / (u * one_minus_q);
    // second = R^2 / (1 - e^{-u}) * [1 - 2/u + 2(1 - e^{-u})/u^2]
    let second = r_tx * r_tx * second_moment_bracket(u) / one_minus_q;
    Ok((mean, second))
}

/// `e^{-u} - 1 + u`, by series near zero where the direct form cancels.
fn excess_exp(u: f64) -> f64 {
    if u >= 1.0 {
        return (-u).exp_m1() + u;
    }
    let mut term = u * u / 2.0;
    let mut sum = term;
    for k in 3..40 {
        term *= -u / k as f64;
        sum += term;
    }
    sum
}

/// `1 - 2/u + 2(1 - e^{-u})/u^2 = sum_{k>=3} 2 (-1)^{k+1} u^{k-2} / k!`.
fn second_moment_bracket(u: f64) -> f64 {
    if u >= 1.0 {
        return 1.0 - 2.0 / u - 2.0 * (-u).exp_m1() / (u * u);
    }
    let mut term = u / 3.0; // k = 3
    let mut sum = term;
    for k in 4..40 {
        term *= -u / k as f64;
        sum += term;
    }
    sum
}

/// The linear approximation as a hop function, tagged with its moments.
#[derive(Debug, Clone, Copy)]
pub struct LinearHops {
    moment1: f64,
    moment2: f64,
    r_tx: f64,
}

impl LinearHops {
    pub fn new(moment1: f64, moment2: f64, r_tx: f64) -> Result<Self> {
        check_moments(moment1, moment2)?;
        ensure_positive("r_tx", r_tx)?;
        Ok(Self { moment1, moment2, r_tx })
    }

    pub fn random_1d(r_tx: f64) -> Result<Self> {
        let (m1, m2) = uniform_moments(r_tx)?;
        Self::new(m1, m2, r_tx)
    }

    pub fn furthest_1d(lambda: f64, r_tx: f64) -> Result<Self> {
        let (m1, m2) = furthest_moments_1d(lambda, r_tx)?;
        Self::new(m1, m2, r_tx)
    }

    pub fn moments(&self) -> (f64, f64) {
        (self.moment1, self.moment2)
    }
}

impl HopFunction for LinearHops {
    /// Negative distances need no transmission; the linear form is used
    /// from the origin on.
    fn hops(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        linear_approx(x, self.moment1, self.moment2)
    }

    fn method(&self) -> HopMethod {
        HopMethod::LinearApprox
    }

    fn r_tx(&self) -> f64 {
        self.r_tx
    }
}
