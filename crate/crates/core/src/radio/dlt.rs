//! Proof-of-work race and block propagation.

use crate::units::Seconds;

use super::config::{DltConfig, RadioConfig};
use super::queueing::{downlink_latency, uplink_latency};
use super::{seconds, RadioError};

/// `L_W = 1/(λ_c·M)`: the first of `M` exponential miners finishes at rate `M·λ_c`.
pub fn pow_latency(dlt: &DltConfig) -> Result<Seconds, RadioError> {
    dlt.validate()?;
    seconds("L_pow", 1.0 / (dlt.lambda_c() * dlt.miners as f64))
}

/// `L_tM = L_newB + L_getB + L_transB`: announce the block (uplink), request
/// it (downlink) and ship it (uplink). Each message has a fixed size `s`, so
/// its moments are `(s, s²)`.
pub fn block_exchange_latency(radio: &RadioConfig, dlt: &DltConfig) -> Result<Seconds, RadioError> {
    dlt.validate()?;
    let new_b = uplink_latency(radio, dlt.hash_size, dlt.hash_size * dlt.hash_size)?;
    let get_b = downlink_latency(radio, dlt.request_size, dlt.request_size * dlt.request_size)?;
    let trans_b = uplink_latency(radio, dlt.block_size, dlt.block_size * dlt.block_size)?;
    Ok(new_b + get_b + trans_b)
}
