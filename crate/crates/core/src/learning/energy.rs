//! Communication energy of one message, from the Shannon rate inverted for
//! transmit power.

use super::LearningError;
use crate::rng::Seed;
use crate::units::{Bits, Joules};

/// Radio parameters shared by all workers, plus one channel gain per worker.
#[derive(Debug, Clone, PartialEq)]
pub struct CommEnergyModel {
    bandwidth_hz: f64,
    slot_s: f64,
    noise_psd: f64,
    gains: Vec<f64>,
}

impl CommEnergyModel {
    pub fn new(
        bandwidth_hz: f64,
        slot_s: f64,
        noise_psd: f64,
        gains: Vec<f64>,
    ) -> Result<Self, LearningError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(bandwidth_hz) || !positive(slot_s) || !positive(noise_psd) {
            return Err(LearningError::InvalidParameter(
                "bandwidth, slot and noise density must be positive",
            ));
        }
        if gains.is_empty() || !gains.iter().all(|&g| positive(g)) {
            return Err(LearningError::InvalidParameter(
                "channel gains must be positive",
            ));
        }
        Ok(Self {
            bandwidth_hz,
            slot_s,
            noise_psd,
            gains,
        })
    }

    /// 1 MHz, 1 ms slots, -174 dBm/Hz noise and per-worker gains drawn
    /// log-uniformly from `[1e-9, 1e-8]`.
    pub fn with_random_gains(workers: usize, seed: Seed) -> Self {
        let mut rng = seed.derive(0x6A1_5EED).rng();
        let gains = (0..workers)
            .map(|_| 10f64.powf(-9.0 + rng.next_uniform()))
            .collect();
        Self::new(1e6, 1e-3, 4e-21, gains).expect("valid defaults")
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn slot_s(&self) -> f64 {
        self.slot_s
    }

    pub fn noise_psd(&self) -> f64 {
        self.noise_psd
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn gain(&self, worker: usize) -> f64 {
        self.gains[worker]
    }

    pub fn workers(&self) -> usize {
        self.gains.len()
    }

    /// The same model with the total bandwidth split evenly among
    /// `transmitters` simultaneous senders.
    pub fn shared(&self, transmitters: usize) -> Self {
        Self {
            bandwidth_hz: self.bandwidth_hz / transmitters.max(1) as f64,
            ..self.clone()
        }
    }

    /// Channel gains for a subset/reordering of workers.
    pub fn with_gains(&self, gains: Vec<f64>) -> Result<Self, LearningError> {
        Self::new(self.bandwidth_hz, self.slot_s, self.noise_psd, gains)
    }
}

/// `E = T · (N0·W / g) · (2^{payload / (T·W)} - 1)`: the energy needed to push
/// `payload` bits through a `W`-Hz channel in one slot of `T` seconds.
pub fn message_energy(payload: Bits, model: &CommEnergyModel, gain: f64) -> Joules {
    let tw = model.slot_s * model.bandwidth_hz;
    let power = model.noise_psd * model.bandwidth_hz / gain * ((payload.value() / tw).exp2() - 1.0);
    Joules::new(model.slot_s * power).unwrap_or(Joules::ZERO)
}
