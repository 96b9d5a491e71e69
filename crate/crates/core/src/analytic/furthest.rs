//! Furthest-neighbor hop function on a line.
//!
//! The closed form is a sum of terms of size `e^{psi(x)}` whose result is
//! O(x/R): at `lambda R = 100` and `x = 10R` the terms reach `e^{1000}`.
//! Double precision cannot represent, let alone cancel, such terms, so the
//! series and the `C_n` table are evaluated in binary floating point with
//! a working precision sized to the largest exponent that can appear.

use std::sync::Mutex;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use log::warn;

use crate::analytic::{furthest_moments_1d, linear_approx, HopFunction, HopMethod, DEFAULT_SERIES_HORIZON};
use crate::error::{ensure_positive, Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: f64 = 192.0;
/// Relative mismatch tolerated when each new `C_n` is checked against the
/// continuity condition it was derived from.
const CONTINUITY_REL_TOL: f64 = 1e-12;

/// `psi(x) = lambda x / (1 - e^{-lambda R})`.
pub fn psi(x: f64, lambda: f64, r_tx: f64) -> Result<f64> {
    ensure_positive("lambda", lambda)?;
    ensure_positive("r_tx", r_tx)?;
    Ok(lambda * x / -(-lambda * r_tx).exp_m1())
}

/// The integration constant `C_n` of the furthest-neighbor hop function on
/// `((n-1)R, nR]`. The value is rounded from the extended-precision table
/// and may underflow to zero for large `n` at high density.
pub fn c_n(n: u32, lambda: f64, r_tx: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            expected: "must be >= 1",
        });
    }
    let series = FurthestHops::new(lambda, r_tx)?.with_horizon(n.max(DEFAULT_SERIES_HORIZON));
    series.c_n(n)
}

/// Expected forwarding transmissions to move beyond `x` under
/// furthest-neighbor routing with node density `lambda`.
pub fn n_furthest_1d(x: f64, lambda: f64, r_tx: f64) -> Result<f64> {
    FurthestHops::new(lambda, r_tx)?.eval(x)
}

struct Table {
    ctx: Ctx,
    consts: Consts,
    /// `c[i]` holds `C_{i+1}`.
    c: Vec<BigFloat>,
}

/// Furthest-neighbor hop function. The `C_n` table is memoized behind a
/// mutex, so one instance can be shared across threads.
pub struct FurthestHops {
    lambda: f64,
    r_tx: f64,
    horizon: u32,
    precision: usize,
    table: Mutex<Option<Table>>,
}

impl std::fmt::Debug for FurthestHops {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FurthestHops")
            .field("lambda", &self.lambda)
            .field("r_tx", &self.r_tx)
            .field("horizon", &self.horizon)
            .field("precision", &self.precision)
            .finish()
    }
}

impl Clone for FurthestHops {
    fn clone(&self) -> Self {
        Self {
            lambda: self.lambda,
            r_tx: self.r_tx,
            horizon: self.horizon,
            precision: self.precision,
            table: Mutex::new(None),
        }
    }
}

impl FurthestHops {
    pub fn new(lambda: f64, r_tx: f64) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        ensure_positive("r_tx", r_tx)?;
        let mut s = Self {
            lambda,
            r_tx,
            horizon: DEFAULT_SERIES_HORIZON,
            precision: 0,
            table: Mutex::new(None),
        };
        s.precision = s.required_precision(s.horizon);
        Ok(s)
    }

    pub fn with_horizon(mut self, horizon: u32) -> Self {
        self.horizon = horizon.max(1);
        self.precision = self.required_precision(self.horizon);
        self.table = Mutex::new(None);
        self
    }

    /// Overrides the working precision (bits). Mostly useful to check that
    /// the default precision is sufficient.
    pub fn with_precision(mut self, bits: usize) -> Self {
        self.precision = bits.max(64);
        self.table = Mutex::new(None);
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    // The terms reach e^{psi(horizon R)} and the table entries shrink like
    // its inverse; twice that span plus guard bits covers both.
    fn required_precision(&self, horizon: u32) -> usize {
        let span = psi(horizon as f64 * self.r_tx, self.lambda, self.r_tx).unwrap_or(0.0);
        let bits = 2.0 * span / std::f64::consts::LN_2 + GUARD_BITS;
        (bits / 64.0).ceil() as usize * 64
    }

    pub fn c_n(&self, n: u32) -> Result<f64> {
        if n < 1 {
            return Err(Error::Domain {
                name: "n",
                value: n as f64,
                expected: "must be >= 1",
            });
        }
        if n > self.horizon {
            return Err(Error::Domain {
                name: "n",
                value: n as f64,
                expected: "must not exceed the series horizon",
            });
        }
        self.with_table(n, |_, c, _| Ok(to_f64(&c[n as usize - 1])))
    }

    /// `N_F(x)`: 0 for `x < 0`, 1 at the origin, the closed form up to the
    /// series horizon and the linear approximation beyond it.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain {
                name: "x",
                value: x,
                expected: "must not be NaN",
            });
        }
        if x < 0.0 {
            return Ok(0.0);
        }
        if x == 0.0 {
            return Ok(1.0);
        }
        let n = (x / self.r_tx).ceil();
        if n > self.horizon as f64 {
            warn!(
                "furthest-neighbor series: ceil(x/R) = {n} exceeds horizon {}; using the linear approximation",
                self.horizon
            );
            let (m1, m2) = furthest_moments_1d(self.lambda, self.r_tx)?;
            return linear_approx(x, m1, m2);
        }
        let n = n as u32;
        self.with_table(n, |ctx, c, consts| Ok(to_f64(&ctx.branch(n, x, c, consts))))
    }

    /// The closed form for `((n-1)R, nR]`, evaluated at any `x`; `n` may
    /// not exceed the horizon.
    pub fn branch(&self, n: u32, x: f64) -> Result<f64> {
        self.c_n(n)?;
        self.with_table(n, |ctx, c, consts| Ok(to_f64(&ctx.branch(n, x, c, consts))))
    }

    fn with_table<T>(
        &self,
        n: u32,
        f: impl FnOnce(&Ctx, &[BigFloat], &mut Consts) -> Result<T>,
    ) -> Result<T> {
        let mut guard = self.table.lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            *guard = Some(Table {
                ctx: Ctx::new(self.lambda, self.r_tx, self.precision)?,
                consts: Consts::new().map_err(|_| Error::InvalidParams("big-float constants".into()))?,
                c: Vec::new(),
            });
        }
        let Table { ctx, consts, c } = guard.as_mut().expect("initialized above");
        ctx.extend(c, n as usize, consts)?;
        f(ctx, c, consts)
    }
}

impl HopFunction for FurthestHops {
    fn hops(&self, x: f64) -> Result<f64> {
        self.eval(x)
    }

    fn method(&self) -> HopMethod {
        HopMethod::ExactFurthest1D
    }

    fn r_tx(&self) -> f64 {
        self.r_tx
    }
}

/// Extended-precision constants for one `(lambda, R)` pair. `q` and
/// `kappa` are derived from the same big-float `lambda`, so the series is
/// evaluated exactly for the given f64 inputs; mixing independently
/// rounded f64 constants would destroy the cancellation.
struct Ctx {
    p: usize,
    r: BigFloat,
    q: BigFloat,
    kappa: BigFloat,
    one_minus_q: BigFloat,
}

impl Ctx {
    fn new(lambda: f64, r_tx: f64, p: usize) -> Result<Self> {
        let mut consts = Consts::new().map_err(|_| Error::InvalidParams("big-float constants".into()))?;
        let lam = BigFloat::from_f64(lambda, p);
        let r = BigFloat::from_f64(r_tx, p);
        let q = lam.mul(&r, p, RM).neg().exp(p, RM, &mut consts);
        let one = BigFloat::from_word(1, p);
        let one_minus_q = one.sub(&q, p, RM);
        let kappa = lam.div(&one_minus_q, p, RM);
        Ok(Self {
            p,
            r,
            q,
            kappa,
            one_minus_q,
        })
    }

    fn int(&self, v: i64) -> BigFloat {
        let b = BigFloat::from_word(v.unsigned_abs(), self.p);
        if v < 0 {
            b.neg()
        } else {
            b
        }
    }

    /// psi at `m * R` for integer `m`.
    fn psi_r(&self, m: i64) -> BigFloat {
        self.kappa.mul(&self.r, self.p, RM).mul(&self.int(m), self.p, RM)
    }

    fn psi_big(&self, x: &BigFloat) -> BigFloat {
        self.kappa.mul(x, self.p, RM)
    }

    fn exp(&self, v: &BigFloat, consts: &mut Consts) -> BigFloat {
        v.exp(self.p, RM, consts)
    }

    fn factorial(&self, k: u32) -> BigFloat {
        (2..=k as i64).fold(self.int(1), |acc, i| acc.mul(&self.int(i), self.p, RM))
    }

    /// Grows the table to hold `C_1..=C_n`, checking continuity at
    /// `x = (m-1)R` for every new `C_m` with `m >= 2`.
    fn extend(&self, c: &mut Vec<BigFloat>, n: usize, consts: &mut Consts) -> Result<()> {
        let p = self.p;
        while c.len() < n {
            let m = c.len() + 1;
            let value = match m {
                1 => self.q.clone(),
                2 => {
                    // e^{psi(-R)} [psi(R) C_1 + q - 1] + C_1
                    let inner = self.psi_r(1).mul(&c[0], p, RM).add(&self.q, p, RM).sub(&self.int(1), p, RM);
                    self.exp(&self.psi_r(-1), consts).mul(&inner, p, RM).add(&c[0], p, RM)
                }
                _ => {
                    let mi = m as i64;
                    let q_minus_one = self.one_minus_q.neg();
                    let mut acc = self
                        .exp(&self.psi_r(-(mi - 1)), consts)
                        .mul(&q_minus_one, p, RM)
                        .add(&c[m - 2], p, RM);
                    let psi_top = self.psi_r(mi - 1);
                    for k in 1..=(m - 2) {
                        let ki = k as i64;
                        let mut term = psi_top.mul(&self.psi_r(mi - 1 - ki).powi(k - 1, p, RM), p, RM);
                        let denom = self.factorial(k as u32).mul(&self.exp(&self.psi_r(ki), consts), p, RM);
                        term = term.div(&denom, p, RM);
                        if k % 2 == 1 {
                            term = term.neg();
                        }
                        // C_{m-k-1} - C_{m-k}
                        let diff = c[m - k - 2].sub(&c[m - k - 1], p, RM);
                        acc = acc.add(&term.mul(&diff, p, RM), p, RM);
                    }
                    acc
                }
            };
            c.push(value);
            if m >= 2 {
                self.check_continuity(c, m, consts)?;
            }
        }
        Ok(())
    }

    fn check_continuity(&self, c: &[BigFloat], m: usize, consts: &mut Consts) -> Result<()> {
        let x = self.r.mul(&self.int(m as i64 - 1), self.p, RM);
        let left = self.branch_big(m as u32 - 1, &x, c, consts);
        let right = self.branch_big(m as u32, &x, c, consts);
        let left_f = to_f64(&left);
        let right_f = to_f64(&right);
        let gap = (left_f - right_f).abs();
        if !(gap <= CONTINUITY_REL_TOL * left_f.abs().max(1.0)) {
            return Err(Error::NoConvergence {
                what: "furthest-neighbor C_n continuity check",
                achieved: gap,
            });
        }
        Ok(())
    }

    fn branch(&self, n: u32, x: f64, c: &[BigFloat], consts: &mut Consts) -> BigFloat {
        self.branch_big(n, &BigFloat::from_f64(x, self.p), c, consts)
    }

    /// The closed form on `((n-1)R, nR]`:
    ///
    /// `C_n e^{psi(x)} + n(1-q) + sum_{k=1}^{n-1} (-1)^k psi(x) psi(x-kR)^{k-1} / k! e^{psi(x-kR)} C_{n-k}`
    fn branch_big(&self, n: u32, x: &BigFloat, c: &[BigFloat], consts: &mut Consts) -> BigFloat {
        let p = self.p;
        let psi_x = self.psi_big(x);
        let mut acc = c[n as usize - 1]
            .mul(&self.exp(&psi_x, consts), p, RM)
            .add(&self.int(n as i64).mul(&self.one_minus_q, p, RM), p, RM);
        for k in 1..n {
            let shifted = x.sub(&self.r.mul(&self.int(k as i64), p, RM), p, RM);
            let psi_s = self.psi_big(&shifted);
            let mut term = psi_x.clone();
            if k > 1 {
                term = term.mul(&psi_s.powi(k as usize - 1, p, RM), p, RM);
            }
            term = term
                .div(&self.factorial(k), p, RM)
                .mul(&self.exp(&psi_s, consts), p, RM)
                .mul(&c[(n - k) as usize - 1], p, RM);
            if k % 2 == 1 {
                term = term.neg();
            }
            acc = acc.add(&term, p, RM);
        }
        acc
    }
}

/// Rounds a big float to the nearest-below f64 (truncating the mantissa
/// to its top 64 bits first).
fn to_f64(v: &BigFloat) -> f64 {
    match v.as_raw_parts() {
        None => f64::NAN,
        Some((words, _, sign, exponent, _)) => {
            let Some(&top) = words.last() else {
                return 0.0;
            };
            if top == 0 {
                return 0.0;
            }
            // value = 0.m * 2^e, with `top` holding the leading 64 bits.
            let scale = exponent as i64 - 64;
            let mag = ldexp(top as f64, scale);
            if sign == Sign::Neg {
                -mag
            } else {
                mag
            }
        }
    }
}

fn ldexp(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: f64 = 250.0;

    #[test]
    fn big_float_round_trip() {
        for &v in &[3.5, -0.125, 1e-300, 4.539_992_976_248_485e-5, 123_456.789] {
            let b = BigFloat::from_f64(v, 256);
            assert_eq!(to_f64(&b), v);
        }
    }

    #[test]
    fn psi_spot_values() {
        assert_eq!(psi(0.0, 0.04, R).unwrap(), 0.0);
        let expect = 4.0 / (1.0 - (-10f64).exp());
        assert!((psi(100.0, 0.04, R).unwrap() - expect).abs() < 1e-13);
        assert!((psi(100.0, 0.04, R).unwrap() - 4.000_181_6).abs() < 1e-6);
        assert!((psi(-250.0, 0.04, R).unwrap() + 10.000_454).abs() < 1e-5);
        assert!(psi(1.0, 0.0, R).is_err());
    }

    #[test]
    fn c_n_base_and_domain() {
        let c1 = c_n(1, 0.04, R).unwrap();
        assert!((c1 - (-10f64).exp()).abs() < 1e-18);
        assert!(c_n(0, 0.04, R).is_err());
    }

    #[test]
    fn c2_matches_its_closed_form() {
        let lam = 0.04;
        let q = (-lam * R).exp();
        let psi_r = psi(R, lam, R).unwrap();
        let expect = psi(-R, lam, R).unwrap().exp() * (psi_r * q + q - 1.0) + q;
        let got = c_n(2, lam, R).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn origin_and_negative() {
        assert_eq!(n_furthest_1d(0.0, 0.04, R).unwrap(), 1.0);
        assert_eq!(n_furthest_1d(-1.0, 0.04, R).unwrap(), 0.0);
    }

    #[test]
    fn first_interval_closed_form() {
        // N_F(x) = q e^{psi(x)} + 1 - q on (0, R]
        for &lam in &[0.04, 0.12, 0.4] {
            let q = (-lam * R).exp();
            for &x in &[1.0, 125.0, 249.0, 250.0] {
                let expect = q * psi(x, lam, R).unwrap().exp() + 1.0 - q;
                let got = n_furthest_1d(x, lam, R).unwrap();
                assert!((got - expect).abs() < 1e-12, "lam={lam} x={x}: {got} vs {expect}");
            }
        }
        // q e^{psi(R)} = e^{-10} e^{10.000454} = e^{0.000454}
        let v = n_furthest_1d(250.0, 0.04, R).unwrap();
        assert!((v - 2.000_408_7).abs() < 1e-6, "{v}");
    }

    /// High-precision values of the closed form, independently confirmed by
    /// solving the renewal equation numerically (see the integration tests).
    #[test]
    fn frozen_reference_values() {
        let cases = [
            (0.04, 125.0, 1.006_694_076_823_996_5),
            (0.04, 375.0, 2.040_362_892_884_872_3),
            (0.04, 1000.0, 5.029_086_020_855_573),
            (0.04, 2500.0, 11.603_995_574_042_067),
            (0.12, 1000.0, 5.000_000_003_623_833),
            (0.12, 2500.0, 11.000_022_348_774_719),
            (0.4, 1000.0, 5.0),
        ];
        for (lam, x, expect) in cases {
            let got = n_furthest_1d(x, lam, R).unwrap();
            assert!((got - expect).abs() < 1e-9, "lam={lam} x={x}: {got} vs {expect}");
        }
    }

    #[test]
    fn default_precision_is_sufficient() {
        for &lam in &[0.04, 0.4, 1.0] {
            let base = FurthestHops::new(lam, R).unwrap();
            let fine = FurthestHops::new(lam, R).unwrap().with_precision(base.precision() * 2);
            for &x in &[333.0, 1750.0, 4999.0] {
                let a = base.eval(x).unwrap();
                let b = fine.eval(x).unwrap();
                assert!((a - b).abs() < 1e-12, "lam={lam} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn beyond_horizon_uses_linear_form() {
        let h = FurthestHops::new(0.04, R).unwrap().with_horizon(3);
        let (m1, m2) = furthest_moments_1d(0.04, R).unwrap();
        let x = 1200.0;
        assert!((h.eval(x).unwrap() - linear_approx(x, m1, m2).unwrap()).abs() < 1e-12);
    }
}
