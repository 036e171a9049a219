//! End-to-end latency and energy, term by term.

use std::fmt;

use crate::units::{Joules, Probability, Seconds};

use super::access::{
    attempt_weights, latency_ra, latency_rar, latency_rr, reservation_probability,
};
use super::config::{DltConfig, PowerProfile, RadioConfig};
use super::dlt::{block_exchange_latency, pow_latency};
use super::queueing::{latency_rx, latency_tx};
use super::{joules, RadioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    SyncUp,
    ReserveUp,
    Transmit,
    SleepUp,
    SyncDown,
    ReserveDown,
    Receive,
    SleepDown,
    Pow,
    BlockExchange,
}

impl Term {
    pub const ALL: [Term; 10] = [
        Term::SyncUp,
        Term::ReserveUp,
        Term::Transmit,
        Term::SleepUp,
        Term::SyncDown,
        Term::ReserveDown,
        Term::Receive,
        Term::SleepDown,
        Term::Pow,
        Term::BlockExchange,
    ];

    /// Column-friendly name.
    pub fn name(self) -> &'static str {
        match self {
            Term::SyncUp => "sync_u",
            Term::ReserveUp => "rr_u",
            Term::Transmit => "tx_u",
            Term::SleepUp => "sleep_u",
            Term::SyncDown => "sync_d",
            Term::ReserveDown => "rr_d",
            Term::Receive => "rx_d",
            Term::SleepDown => "sleep_d",
            Term::Pow => "pow",
            Term::BlockExchange => "block_exchange",
        }
    }

    pub fn is_ledger(self) -> bool {
        matches!(self, Term::Pow | Term::BlockExchange)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Part {
    pub term: Term,
    pub latency: Seconds,
    pub energy: Joules,
}

/// Every named latency/energy term of one transaction, in [`Term::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyEnergyBreakdown {
    pub p_rr: Probability,
    pub lambda_tot: f64,
    parts: Vec<Part>,
}

impl LatencyEnergyBreakdown {
    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn part(&self, term: Term) -> Part {
        self.parts[Term::ALL
            .iter()
            .position(|&t| t == term)
            .expect("every term is present")]
    }

    /// `L = L_UeD + L_DLT`.
    pub fn total_latency(&self) -> Seconds {
        self.parts.iter().map(|p| p.latency).sum()
    }

    /// `E_UD + E_DLT`.
    pub fn total_energy(&self) -> Joules {
        self.parts.iter().map(|p| p.energy).sum()
    }

    pub fn radio_latency(&self) -> Seconds {
        self.parts
            .iter()
            .filter(|p| !p.term.is_ledger())
            .map(|p| p.latency)
            .sum()
    }

    pub fn radio_energy(&self) -> Joules {
        self.parts
            .iter()
            .filter(|p| !p.term.is_ledger())
            .map(|p| p.energy)
            .sum()
    }

    pub fn ledger_latency(&self) -> Seconds {
        self.parts
            .iter()
            .filter(|p| p.term.is_ledger())
            .map(|p| p.latency)
            .sum()
    }

    pub fn ledger_energy(&self) -> Joules {
        self.parts
            .iter()
            .filter(|p| p.term.is_ledger())
            .map(|p| p.energy)
            .sum()
    }
}

/// Latency and energy with `P_rr` from the reservation fixed point.
pub fn breakdown(
    radio: &RadioConfig,
    power: &PowerProfile,
    dlt: &DltConfig,
) -> Result<LatencyEnergyBreakdown, RadioError> {
    let r = reservation_probability(radio)?;
    let mut b = energy_breakdown(radio, power, dlt, r.p_rr)?;
    b.lambda_tot = r.lambda_tot;
    Ok(b)
}

/// Total end-to-end latency `L_UeD + L_DLT`.
pub fn e2e_latency(radio: &RadioConfig, dlt: &DltConfig) -> Result<Seconds, RadioError> {
    Ok(breakdown(radio, &PowerProfile::zero(), dlt)?.total_latency())
}

/// All terms for a given `P_rr`.
///
/// Energies: `E_sync = P_l·L_sync`, `E_rr = Σ_l (1 - P_rr)^(l-1)·P_rr·(E_ra + E_rar)`
/// with `E_ra = (L_ra - τ)·P_I + τ·(P_c + P_e·P_t)` and `E_rar = P_l·L_rar`,
/// `E_tx = (L_tx - l1/(R^u·w))·P_I + (P_c + P_e·P_t)·l1/(R^u·w)`,
/// `E_rx = (L_rx - m1/(R^d·y))·P_I + P_l·m1/(R^d·y)`, and for the ledger
/// `P_c^miner·L_W` plus `P_t·L_tM`. Unlike `L_rr`, the `E_rr` sum carries no
/// attempt-count factor. Uplink and downlink share `P_rr`. `lambda_tot` is
/// reported as NaN because it is not derived here.
pub fn energy_breakdown(
    radio: &RadioConfig,
    power: &PowerProfile,
    dlt: &DltConfig,
    p_rr: Probability,
) -> Result<LatencyEnergyBreakdown, RadioError> {
    radio.validate()?;
    power.validate()?;
    dlt.validate()?;
    let active = power.p_circuit + power.p_e * power.p_transmit;

    let l_sync = crate::units::Seconds::new(radio.l_sync).expect("validated");
    let e_sync = joules("E_sync", power.p_listen * radio.l_sync)?;

    let l_rr = latency_rr(radio, p_rr)?;
    let e_ra = (latency_ra(radio) - radio.tau) * power.p_idle + radio.tau * active;
    let e_rar = power.p_listen * latency_rar(radio);
    let e_rr = joules(
        "E_rr",
        attempt_weights(p_rr.value(), radio.n_rmax)
            .map(|(_, w)| w * (e_ra + e_rar))
            .sum(),
    )?;

    let l_tx = latency_tx(radio)?;
    let airtime_up = radio.l1 / (radio.rate_up * radio.uplink_share());
    let e_tx = joules("E_tx idle time", l_tx.value() - airtime_up)
        .map(|idle| idle.value() * power.p_idle + active * airtime_up)
        .and_then(|e| joules("E_tx", e))?;

    let l_rx = latency_rx(radio)?;
    let airtime_down = radio.m1 / (radio.rate_down * radio.y);
    let e_rx = joules("E_rx idle time", l_rx.value() - airtime_down)
        .map(|idle| idle.value() * power.p_idle + power.p_listen * airtime_down)
        .and_then(|e| joules("E_rx", e))?;

    let l_pow = pow_latency(dlt)?;
    let l_tm = block_exchange_latency(radio, dlt)?;
    let e_pow = joules("E_pow", dlt.p_compute * l_pow.value())?;
    let e_tm = joules("E_block_exchange", power.p_transmit * l_tm.value())?;

    let zero = Seconds::ZERO;
    let parts = [
        (l_sync, e_sync),
        (l_rr, e_rr),
        (l_tx, e_tx),
        (zero, joules("E_s_u", power.sleep_up)?),
        (l_sync, e_sync),
        (l_rr, e_rr),
        (l_rx, e_rx),
        (zero, joules("E_s_d", power.sleep_down)?),
        (l_pow, e_pow),
        (l_tm, e_tm),
    ];
    Ok(LatencyEnergyBreakdown {
        p_rr,
        lambda_tot: f64::NAN,
        parts: Term::ALL
            .iter()
            .zip(parts)
            .map(|(&term, (latency, energy))| Part {
                term,
                latency,
                energy,
            })
            .collect(),
    })
}
