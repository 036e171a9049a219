//! Uplink and downlink data latency from the two-server polling model.

use crate::units::Seconds;

use super::config::RadioConfig;
use super::{seconds, RadioError};

/// `L_tx` for an uplink payload with size moments `(l1, l2)`:
///
/// `f·λ^u·s2 / (2·(1 - f·G·s1)) + f·λ^u·s1² / (2·(1 - f·λ^u·s1)) + l1/(R^u·w)`
///
/// with `s1 = f1·l1/(R^u·w)` and `s2 = f1·l2/(R^u·w)²`. The first term is the
/// printed `f·λ^u·s1·s2 / (2·s1·(1 - f·G·s1))` with `s1` cancelled, which
/// keeps it defined for empty payloads.
pub fn uplink_latency(config: &RadioConfig, l1: f64, l2: f64) -> Result<Seconds, RadioError> {
    let service = config.rate_up * config.uplink_share();
    let s1 = config.f1 * l1 / service;
    let s2 = config.f1 * l2 / (service * service);
    let load = config.f * config.lambda_up();
    let batch_margin = 1.0 - config.f * config.g * s1;
    let queue_margin = 1.0 - load * s1;
    if batch_margin <= 0.0 {
        return Err(RadioError::Unstable {
            term: "L_tx",
            condition: "f·G·s1 < 1",
            value: 1.0 - batch_margin,
        });
    }
    if queue_margin <= 0.0 {
        return Err(RadioError::Unstable {
            term: "L_tx",
            condition: "f·λ^u·s1 < 1",
            value: 1.0 - queue_margin,
        });
    }
    let value =
        load * s2 / (2.0 * batch_margin) + load * s1 * s1 / (2.0 * queue_margin) + l1 / service;
    seconds("L_tx", value)
}

/// `L_rx` for a downlink payload with size moments `(m1, m2)`:
///
/// `0.5·F·t⁻¹ / (1 - F·h1·t⁻¹) + F·h1 / (1 - F·h1·t⁻¹) + m2/(R^d·y)`
///
/// with `h1 = f·m1/(R^d·y)` and `F = f·λ^d·t`. The first term is the printed
/// `0.5·F·h1·t⁻¹ / (h1·(1 - F·h·t⁻¹))` with `h1` cancelled; the bare `h` is
/// read as `h1`.
pub fn downlink_latency(config: &RadioConfig, m1: f64, m2: f64) -> Result<Seconds, RadioError> {
    let service = config.rate_down * config.y;
    let h1 = config.f * m1 / service;
    let big_f = config.f * config.lambda_d * config.t;
    let margin = 1.0 - big_f * h1 / config.t;
    if margin <= 0.0 {
        return Err(RadioError::Unstable {
            term: "L_rx",
            condition: "F·h1/t < 1",
            value: 1.0 - margin,
        });
    }
    let value = 0.5 * big_f / config.t / margin + big_f * h1 / margin + m2 / service;
    seconds("L_rx", value)
}

/// Uplink data latency for the configured packet moments.
pub fn latency_tx(config: &RadioConfig) -> Result<Seconds, RadioError> {
    config.validate()?;
    uplink_latency(config, config.l1, config.l2)
}

/// Downlink data latency for the configured packet moments.
pub fn latency_rx(config: &RadioConfig) -> Result<Seconds, RadioError> {
    config.validate()?;
    downlink_latency(config, config.m1, config.m2)
}
