//! NB-IoT access and transmission latency/energy with proof-of-work ledger terms.

mod access;
mod breakdown;
mod config;
mod dlt;
mod oracle;
mod queueing;

use thiserror::Error;

use crate::fixed_point::FixedPointError;
use crate::units::{Joules, Seconds};

pub use access::{
    collision_probability, collision_probability_approx, latency_ra, latency_rar, latency_rr,
    reservation_probability, reservation_success, Reservation,
};
pub use breakdown::{breakdown, e2e_latency, energy_breakdown, LatencyEnergyBreakdown, Part, Term};
pub use config::{DltConfig, PowerProfile, RadioConfig};
pub use dlt::{block_exchange_latency, pow_latency};
pub use oracle::{
    monte_carlo_reservation, pow_latency_oracle, MonteCarloEstimate, ReservationEstimate,
    BACKOFF_WINDOW, WARMUP_FRACTION,
};
pub use queueing::{downlink_latency, latency_rx, latency_tx, uplink_latency};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadioError {
    #[error("{field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("{term} is unstable: needs {condition}, got {value}")]
    Unstable {
        term: &'static str,
        condition: &'static str,
        value: f64,
    },
    #[error("{term} came out negative ({value})")]
    NegativeTerm { term: &'static str, value: f64 },
    #[error(transparent)]
    FixedPoint(#[from] FixedPointError),
}

fn seconds(term: &'static str, value: f64) -> Result<Seconds, RadioError> {
    Seconds::new(value).map_err(|_| RadioError::NegativeTerm { term, value })
}

fn joules(term: &'static str, value: f64) -> Result<Joules, RadioError> {
    Joules::new(value).map_err(|_| RadioError::NegativeTerm { term, value })
}
