//! Line-of-sight channel arithmetic: the LOS tap, S21 to received power,
//! the log-distance link budget and instantaneous SNR.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelTap {
    /// Linear amplitude a_l.
    pub gain: f64,
    /// Delay t_l in seconds.
    pub delay: f64,
    /// Carrier phase 2π·f_c·t_l reduced to [0, 2π).
    pub phase: f64,
}

impl ChannelTap {
    pub fn new(gain: f64, delay: f64, carrier_hz: f64) -> Result<Self> {
        if !(gain >= 0.0 && gain.is_finite()) {
            return Err(Error::domain(format!("tap gain must be >= 0, got {gain}")));
        }
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::domain(format!("tap delay must be >= 0, got {delay}")));
        }
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(Error::domain(format!("carrier must be > 0, got {carrier_hz}")));
        }
        Ok(Self {
            gain,
            delay,
            phase: carrier_phase(carrier_hz, delay),
        })
    }

    /// Complex baseband coefficient a·e^{−jφ}.
    pub fn baseband(&self) -> Complex64 {
        Complex64::from_polar(self.gain, -self.phase)
    }
}

// f_c·t is split into whole and fractional cycles before scaling by 2π so
// that large carrier-delay products keep their fractional precision.
fn carrier_phase(carrier_hz: f64, delay: f64) -> f64 {
    let cycles = carrier_hz * delay;
    let phase = TAU * (cycles - cycles.floor());
    if phase >= TAU {
        0.0
    } else {
        phase
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelImpulseResponse {
    taps: Vec<ChannelTap>,
}

impl ChannelImpulseResponse {
    pub fn new(taps: Vec<ChannelTap>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::domain("an impulse response needs at least one tap"));
        }
        if taps.windows(2).any(|w| w[1].delay < w[0].delay) {
            return Err(Error::domain("tap delays must be non-decreasing"));
        }
        Ok(Self { taps })
    }

    pub fn taps(&self) -> &[ChannelTap] {
        &self.taps
    }

    pub fn n_taps(&self) -> usize {
        self.taps.len()
    }

    /// Narrowband response Σ a_l e^{−jφ_l}.
    pub fn narrowband_gain(&self) -> Complex64 {
        self.taps.iter().map(ChannelTap::baseband).sum()
    }
}

/// Single-tap line-of-sight channel with delay d/c.
pub fn los_channel(distance_m: f64, carrier_hz: f64, gain: f64) -> Result<ChannelImpulseResponse> {
    if !(distance_m > 0.0 && distance_m.is_finite()) {
        return Err(Error::domain(format!("distance must be > 0, got {distance_m}")));
    }
    let tap = ChannelTap::new(gain, distance_m / SPEED_OF_LIGHT, carrier_hz)?;
    ChannelImpulseResponse::new(vec![tap])
}

/// P_rx = |S21|²·P_tx, in the units of `p_tx_linear`.
pub fn received_power_from_s21(s21: Complex64, p_tx_linear: f64) -> Result<f64> {
    if !(p_tx_linear > 0.0 && p_tx_linear.is_finite()) {
        return Err(Error::domain(format!("transmit power must be > 0, got {p_tx_linear}")));
    }
    Ok(s21.norm_sqr() * p_tx_linear)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    p_tx_dbm: f64,
    exponent: f64,
    misalignment_db: f64,
    distance_m: f64,
}

impl LinkBudget {
    pub fn new(p_tx_dbm: f64, exponent: f64, misalignment_db: f64, distance_m: f64) -> Result<Self> {
        if !(p_tx_dbm.is_finite() && misalignment_db.is_finite()) {
            return Err(Error::domain("transmit power and misalignment must be finite"));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::domain(format!("path-loss exponent must be > 0, got {exponent}")));
        }
        if !(distance_m > 0.0 && distance_m.is_finite()) {
            return Err(Error::domain(format!("distance must be > 0, got {distance_m}")));
        }
        Ok(Self {
            p_tx_dbm,
            exponent,
            misalignment_db,
            distance_m,
        })
    }

    pub fn p_tx_dbm(&self) -> f64 {
        self.p_tx_dbm
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn misalignment_db(&self) -> f64 {
        self.misalignment_db
    }

    pub fn distance_m(&self) -> f64 {
        self.distance_m
    }
}

/// P_RX = P_TX − 10·n·log₁₀(d) + M, in dBm.
pub fn path_loss_rx_power_db(budget: &LinkBudget) -> f64 {
    budget.p_tx_dbm - 10.0 * budget.exponent * budget.distance_m.log10() + budget.misalignment_db
}

/// γ = P_rx / (W·N₀).
pub fn instantaneous_snr(p_rx_linear: f64, bandwidth_hz: f64, n0: f64) -> Result<f64> {
    if !(p_rx_linear >= 0.0 && p_rx_linear.is_finite()) {
        return Err(Error::domain(format!("received power must be >= 0, got {p_rx_linear}")));
    }
    if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
        return Err(Error::domain(format!("bandwidth must be > 0, got {bandwidth_hz}")));
    }
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::domain(format!("noise density must be > 0, got {n0}")));
    }
    Ok(p_rx_linear / (bandwidth_hz * n0))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
