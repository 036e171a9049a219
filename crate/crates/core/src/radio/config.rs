use serde::{Deserialize, Serialize};

use super::RadioError;

/// Cell and traffic parameters. Times in seconds, sizes in kilobits and
/// rates in kbit/s; arrival rates are per NPRACH period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    /// Preambles per random-access opportunity.
    #[serde(rename = "K")]
    pub k: u32,
    /// NPRACH unit length.
    pub tau: f64,
    /// Mean time between NPRACH occurrences.
    pub t: f64,
    /// Mean time between NPDCCH occurrences.
    pub d: f64,
    #[serde(rename = "N_rmax")]
    pub n_rmax: u32,
    /// Uplink arrivals split into sensing and background traffic, `λ^u = λ_s + λ_b`.
    pub lambda_s: f64,
    pub lambda_b: f64,
    /// Downlink arrivals `λ^d`.
    pub lambda_d: f64,
    /// Link delivery probability.
    pub p_d: f64,
    /// Mean number of queued requests.
    #[serde(rename = "Q")]
    pub q: f64,
    pub f: f64,
    pub f1: f64,
    pub u: f64,
    /// Uplink resource share; `None` derives `1 - tau/t`, the share left after
    /// the NPRACH reservation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    pub y: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "R_u")]
    pub rate_up: f64,
    #[serde(rename = "R_d")]
    pub rate_down: f64,
    /// First two moments of the uplink packet size.
    pub l1: f64,
    pub l2: f64,
    /// First two moments of the downlink packet size.
    pub m1: f64,
    pub m2: f64,
    #[serde(rename = "L_sync")]
    pub l_sync: f64,
}

impl Default for RadioConfig {
    /// A lightly loaded cell whose end-to-end latency has an interior minimum
    /// over `t ∈ [0.04, 2.56]` s: short periods starve the uplink share
    /// `w = 1 - tau/t`, long ones stretch every access attempt.
    fn default() -> Self {
        Self {
            k: 48,
            tau: 0.032,
            t: 0.32,
            d: 0.128,
            n_rmax: 10,
            lambda_s: 0.5,
            lambda_b: 0.5,
            lambda_d: 0.5,
            p_d: 0.95,
            q: 2.0,
            f: 1.0,
            f1: 1.0,
            u: 0.008,
            w: None,
            y: 0.8,
            g: 1.0,
            rate_up: 20.0,
            rate_down: 30.0,
            l1: 1.0,
            l2: 1.25,
            m1: 1.0,
            m2: 1.25,
            l_sync: 0.33,
        }
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<(), RadioError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(RadioError::InvalidConfig {
            field,
            reason: format!("must be finite and >= 0, got {v}"),
        })
    }
}

fn positive(field: &'static str, v: f64) -> Result<(), RadioError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(RadioError::InvalidConfig {
            field,
            reason: format!("must be finite and > 0, got {v}"),
        })
    }
}

fn share(field: &'static str, v: f64) -> Result<(), RadioError> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(RadioError::InvalidConfig {
            field,
            reason: format!("must lie in (0, 1], got {v}"),
        })
    }
}

impl RadioConfig {
    pub fn lambda_up(&self) -> f64 {
        self.lambda_s + self.lambda_b
    }

    /// `λ^a = λ^u + λ^d`.
    pub fn lambda_access(&self) -> f64 {
        self.lambda_up() + self.lambda_d
    }

    pub fn uplink_share(&self) -> f64 {
        self.w.unwrap_or(1.0 - self.tau / self.t)
    }

    /// Range checks only; stability is checked where the queueing terms are
    /// evaluated.
    pub fn validate(&self) -> Result<(), RadioError> {
        if self.k == 0 {
            return Err(RadioError::InvalidConfig {
                field: "K",
                reason: "must be >= 1".into(),
            });
        }
        if self.n_rmax == 0 {
            return Err(RadioError::InvalidConfig {
                field: "N_rmax",
                reason: "must be >= 1".into(),
            });
        }
        positive("tau", self.tau)?;
        positive("t", self.t)?;
        non_negative("d", self.d)?;
        for (field, v) in [
            ("lambda_s", self.lambda_s),
            ("lambda_b", self.lambda_b),
            ("lambda_d", self.lambda_d),
            ("Q", self.q),
            ("f", self.f),
            ("f1", self.f1),
            ("u", self.u),
            ("G", self.g),
            ("l1", self.l1),
            ("l2", self.l2),
            ("m1", self.m1),
            ("m2", self.m2),
            ("L_sync", self.l_sync),
        ] {
            non_negative(field, v)?;
        }
        if !(0.0..=1.0).contains(&self.p_d) {
            return Err(RadioError::InvalidConfig {
                field: "p_d",
                reason: format!("must lie in [0, 1], got {}", self.p_d),
            });
        }
        positive("R_u", self.rate_up)?;
        positive("R_d", self.rate_down)?;
        share("y", self.y)?;
        match self.w {
            Some(w) => share("w", w),
            None if self.tau < self.t => Ok(()),
            None => Err(RadioError::InvalidConfig {
                field: "tau",
                reason: format!(
                    "derived uplink share 1 - tau/t needs tau < t ({} >= {})",
                    self.tau, self.t
                ),
            }),
        }
    }
}

/// Device power draw in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerProfile {
    /// Amplifier efficiency factor applied to the transmit power.
    #[serde(rename = "P_e")]
    pub p_e: f64,
    #[serde(rename = "P_I")]
    pub p_idle: f64,
    #[serde(rename = "P_c")]
    pub p_circuit: f64,
    #[serde(rename = "P_l")]
    pub p_listen: f64,
    #[serde(rename = "P_t")]
    pub p_transmit: f64,
    /// Sleep-state energies per cycle (J).
    #[serde(rename = "E_s_u")]
    pub sleep_up: f64,
    #[serde(rename = "E_s_d")]
    pub sleep_down: f64,
}

impl Default for PowerProfile {
    fn default() -> Self {
        Self {
            p_e: 1.0,
            p_idle: 0.0027,
            p_circuit: 0.05,
            p_listen: 0.1,
            p_transmit: 0.2,
            sleep_up: 0.0,
            sleep_down: 0.0,
        }
    }
}

impl PowerProfile {
    /// All-zero powers.
    pub fn zero() -> Self {
        Self {
            p_e: 1.0,
            p_idle: 0.0,
            p_circuit: 0.0,
            p_listen: 0.0,
            p_transmit: 0.0,
            sleep_up: 0.0,
            sleep_down: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), RadioError> {
        share("P_e", self.p_e)?;
        for (field, v) in [
            ("P_I", self.p_idle),
            ("P_c", self.p_circuit),
            ("P_l", self.p_listen),
            ("P_t", self.p_transmit),
            ("E_s_u", self.sleep_up),
            ("E_s_d", self.sleep_down),
        ] {
            non_negative(field, v)?;
        }
        Ok(())
    }
}

/// Proof-of-work ledger parameters. Message sizes in kilobits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DltConfig {
    /// Number of miners.
    #[serde(rename = "M")]
    pub miners: u32,
    pub lambda_0: f64,
    /// Miner compute power (W); the mining rate is `λ_c = λ_0·P_c`.
    #[serde(rename = "P_c")]
    pub p_compute: f64,
    /// Announcement of a freshly mined block (uplink).
    pub hash_size: f64,
    /// Request for the new block (downlink).
    pub request_size: f64,
    /// The block itself (uplink).
    pub block_size: f64,
}

impl Default for DltConfig {
    fn default() -> Self {
        Self {
            miners: 5,
            lambda_0: 0.5,
            p_compute: 2.0,
            hash_size: 0.256,
            request_size: 0.256,
            block_size: 2.0,
        }
    }
}

impl DltConfig {
    /// `λ_c = λ_0·P_c`.
    pub fn lambda_c(&self) -> f64 {
        self.lambda_0 * self.p_compute
    }

    pub fn validate(&self) -> Result<(), RadioError> {
        if self.miners == 0 {
            return Err(RadioError::InvalidConfig {
                field: "M",
                reason: "must be >= 1".into(),
            });
        }
        positive("lambda_0", self.lambda_0)?;
        positive("P_c", self.p_compute)?;
        non_negative("hash_size", self.hash_size)?;
        non_negative("request_size", self.request_size)?;
        non_negative("block_size", self.block_size)
    }
}
