use log::warn;

use crate::analytic::{linear_approx, HopFunction, HopMethod, DEFAULT_SERIES_HORIZON};
use crate::error::{ensure_positive, Result};
use crate::numeric::CompensatedSum;

/// Expected number of forwarding transmissions needed to move a packet
/// beyond `x` under random-neighbor routing on a line, where each hop is
/// uniform on `[0, r_tx]`:
///
/// `N_R(x) = sum_{k=0}^{ceil(x/R)-1} (-1)^k / k! (x/R - k)^k e^{x/R - k}`
///
/// Returns 0 for `x < 0` and 1 at `x = 0`. Does not depend on node density.
pub fn n_random_1d(x: f64, r_tx: f64) -> Result<f64> {
    RandomHops::new(r_tx).map(|h| h.eval(x))
}

/// Random-neighbor hop function with a configurable series horizon; past
/// `ceil(x/R) > horizon` the linear approximation `2x/R + 2/3` is used.
#[derive(Debug, Clone, Copy)]
pub struct RandomHops {
    r_tx: f64,
    horizon: u32,
}

impl RandomHops {
    pub fn new(r_tx: f64) -> Result<Self> {
        ensure_positive("r_tx", r_tx)?;
        Ok(Self {
            r_tx,
            horizon: DEFAULT_SERIES_HORIZON,
        })
    }

    pub fn with_horizon(mut self, horizon: u32) -> Self {
        self.horizon = horizon.max(1);
        self
    }

    pub fn r_tx(&self) -> f64 {
        self.r_tx
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return 1.0;
        }
        let t = x / self.r_tx;
        let n = t.ceil();
        if n > self.horizon as f64 {
            warn!(
                "random-neighbor series: ceil(x/R) = {n} exceeds horizon {}; using the linear approximation",
                self.horizon
            );
            let r = self.r_tx;
            return linear_approx(x, r / 2.0, r * r / 3.0).expect("uniform moments are valid");
        }
        self.branch(n as u32, x)
    }

    /// The `n`-term series, which equals `N_R` on `((n-1)R, nR]`, evaluated
    /// at any `x`.
    pub fn branch(&self, n: u32, x: f64) -> f64 {
        let t = x / self.r_tx;
        let mut acc = CompensatedSum::new();
        let mut factorial = 1.0f64;
        for k in 0..n {
            if k > 0 {
                factorial *= k as f64;
            }
            let u = t - k as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(sign * u.powi(k as i32) * u.exp() / factorial);
        }
        acc.value()
    }
}

impl HopFunction for RandomHops {
    fn hops(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x))
    }

    fn method(&self) -> HopMethod {
        HopMethod::ExactRandom1D
    }

    fn r_tx(&self) -> f64 {
        self.r_tx
    }
}
