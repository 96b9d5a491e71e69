//! Basic-access (no RTS/CTS) 802.11 exchange timing, used to derive the
//! fraction of a successful exchange occupied by the data frame.

use crate::error::{ensure_non_negative, ensure_positive, Result};

/// Timings in microseconds, sizes in bytes. The default is 802.11b DSSS
/// with a long preamble at 1 Mbit/s and a 1000-byte payload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dot11Timing {
    pub data_rate_bps: f64,
    pub payload_bytes: f64,
    /// MAC header plus FCS.
    pub mac_header_bytes: f64,
    pub ack_bytes: f64,
    /// PLCP preamble and header.
    pub plcp_us: f64,
    pub sifs_us: f64,
    pub difs_us: f64,
    pub slot_us: f64,
    pub cw_min: f64,
}

impl Default for Dot11Timing {
    fn default() -> Self {
        Self {
            data_rate_bps: 1e6,
            payload_bytes: 1000.0,
            mac_header_bytes: 28.0,
            ack_bytes: 14.0,
            plcp_us: 192.0,
            sifs_us: 10.0,
            difs_us: 50.0,
            slot_us: 20.0,
            cw_min: 31.0,
        }
    }
}

impl Dot11Timing {
    fn validate(&self) -> Result<()> {
        ensure_positive("data_rate_bps", self.data_rate_bps)?;
        ensure_positive("payload_bytes", self.payload_bytes)?;
        for (name, v) in [
            ("mac_header_bytes", self.mac_header_bytes),
            ("ack_bytes", self.ack_bytes),
            ("plcp_us", self.plcp_us),
            ("sifs_us", self.sifs_us),
            ("difs_us", self.difs_us),
            ("slot_us", self.slot_us),
            ("cw_min", self.cw_min),
        ] {
            ensure_non_negative(name, v)?;
        }
        Ok(())
    }

    fn bytes_us(&self, bytes: f64) -> f64 {
        bytes * 8.0 / self.data_rate_bps * 1e6
    }

    /// Airtime of the data frame, PLCP included.
    pub fn data_frame_us(&self) -> f64 {
        self.plcp_us + self.bytes_us(self.mac_header_bytes + self.payload_bytes)
    }

    /// SIFS + ACK + DIFS + mean initial backoff.
    pub fn overhead_us(&self) -> f64 {
        let ack = self.plcp_us + self.bytes_us(self.ack_bytes);
        self.sifs_us + ack + self.difs_us + 0.5 * self.cw_min * self.slot_us
    }

    pub fn exchange_us(&self) -> f64 {
        self.data_frame_us() + self.overhead_us()
    }

    /// `T_data / (T_data + T_overhead)`.
    pub fn airtime_fraction(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.data_frame_us() / self.exchange_us())
    }

    /// Payload bits delivered per second of back-to-back exchanges: a
    /// single-hop capacity estimate.
    pub fn single_hop_capacity_bps(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.payload_bytes * 8.0 / (self.exchange_us() * 1e-6))
    }
}
