use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside the domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The collision model breaks down once contending airtime reaches the
    /// whole channel.
    #[error("channel saturated: contending hops {contending} x airtime {airtime} >= 1")]
    Saturated { contending: f64, airtime: f64 },

    #[error("{what} did not converge (achieved {achieved:e})")]
    NoConvergence { what: &'static str, achieved: f64 },

    #[error("{what}: no sign change in [{lo}, {hi}]")]
    NoRoot { what: &'static str, lo: f64, hi: f64 },

    #[error("dead end at position {position}: no forward neighbor in range")]
    DeadEnd { position: f64 },

    #[error("every trial was censored (disconnected) before reaching x = {x}")]
    AllCensored { x: f64 },
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "must be finite and > 0",
        })
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "must be finite and >= 0",
        })
    }
}
