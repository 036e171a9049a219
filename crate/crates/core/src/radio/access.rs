//! Random access: preamble collisions, the reservation fixed point and the
//! expected reservation latency.

use crate::fixed_point::{fixed_point, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::units::{Probability, Seconds};

use super::config::RadioConfig;
use super::{seconds, RadioError};

/// `1 - (1 - 1/K)^(λ_tot - 1)`: a tagged device collides with at least one of
/// the other `λ_tot - 1` contenders. Loads below one contender give 0.
pub fn collision_probability(lambda_tot: f64, k: u32) -> Probability {
    assert!(k >= 1, "K must be at least 1");
    if lambda_tot <= 1.0 {
        return Probability::ZERO;
    }
    let stay = (-(1.0 / k as f64)).ln_1p() * (lambda_tot - 1.0);
    Probability::saturating(-stay.exp_m1())
}

/// `1 - e^(-λ_tot/K)`.
pub fn collision_probability_approx(lambda_tot: f64, k: u32) -> Probability {
    assert!(k >= 1, "K must be at least 1");
    Probability::saturating(-(-lambda_tot.max(0.0) / k as f64).exp_m1())
}

/// `P_rr(λ_tot) = p_d·e^(-λ_tot/K)`.
pub fn reservation_success(lambda_tot: f64, k: u32, p_d: f64) -> Probability {
    Probability::saturating(p_d * (-lambda_tot / k as f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reservation {
    pub p_rr: Probability,
    /// Mean contenders per NPRACH period over all attempt numbers.
    pub lambda_tot: f64,
}

/// Steady state of the retransmission drift.
///
/// With `λ^a(1) = λ^a` and `λ^a(l) = (1 - P_rr)·λ^a(l-1)`, the total load is
/// `λ_tot = Σ_{l=1..N_rmax} λ^a(l) = λ^a·Σ_{l=0..N_rmax-1} (1 - P_rr(λ_tot))^l`,
/// iterated from `λ_tot = λ^a` (no retransmissions yet) to a fixed point.
pub fn reservation_probability(config: &RadioConfig) -> Result<Reservation, RadioError> {
    config.validate()?;
    let (k, p_d, la, n) = (config.k, config.p_d, config.lambda_access(), config.n_rmax);
    let load = |lambda_tot: f64| {
        let fail = reservation_success(lambda_tot, k, p_d).complement().value();
        let mut term = la;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += term;
            term *= fail;
        }
        sum
    };
    let lambda_tot = fixed_point(load, la, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok(Reservation {
        p_rr: reservation_success(lambda_tot, k, p_d),
        lambda_tot,
    })
}

/// `L_ra = 0.5·t + τ`: wait for the next NPRACH, then send the preamble.
pub fn latency_ra(config: &RadioConfig) -> f64 {
    0.5 * config.t + config.tau
}

/// `L_rar = 0.5·d + 0.5·Q·f·u + u`: wait for the NPDCCH, the queue ahead, and
/// the response itself.
pub fn latency_rar(config: &RadioConfig) -> f64 {
    0.5 * config.d + 0.5 * config.q * config.f * config.u + config.u
}

/// Weights `(1 - P)^(l-1)·P` for `l = 1..=n`.
pub(crate) fn attempt_weights(p_rr: f64, n: u32) -> impl Iterator<Item = (u32, f64)> {
    let fail = 1.0 - p_rr;
    (1..=n).scan(p_rr, move |w, l| {
        let current = *w;
        *w *= fail;
        Some((l, current))
    })
}

/// `L_rr = Σ_{l=1..N_rmax} (1 - P_rr)^(l-1)·P_rr·l·(L_ra + L_rar)`.
pub fn latency_rr(config: &RadioConfig, p_rr: Probability) -> Result<Seconds, RadioError> {
    let per_attempt = latency_ra(config) + latency_rar(config);
    let value: f64 = attempt_weights(p_rr.value(), config.n_rmax)
        .map(|(l, w)| w * l as f64 * per_attempt)
        .sum();
    seconds("L_rr", value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lone_contender_never_collides() {
        assert_eq!(collision_probability(1.0, 48).value(), 0.0);
    }

    #[test]
    fn collision_k48_load10() {
        let expected = 1.0 - (47.0f64 / 48.0).powi(9);
        assert!((collision_probability(10.0, 48).value() - expected).abs() < 1e-14);
        assert!((expected - 0.173).abs() < 1e-3);
    }

    #[test]
    fn many_preambles_never_collide() {
        assert!(collision_probability(10.0, 1_000_000_000).value() < 1e-7);
        assert!(collision_probability_approx(10.0, 1_000_000_000).value() < 1e-7);
    }

    #[test]
    fn approximation_is_close_for_large_k() {
        let exact = collision_probability(20.0, 480).value();
        let approx = collision_probability_approx(20.0, 480).value();
        assert!((exact - approx).abs() < 3e-3);
    }

    #[test]
    fn empty_system() {
        let c = RadioConfig {
            lambda_s: 0.0,
            lambda_b: 0.0,
            lambda_d: 0.0,
            p_d: 0.8,
            ..Default::default()
        };
        let r = reservation_probability(&c).unwrap();
        assert_eq!(r.lambda_tot, 0.0);
        assert_eq!(r.p_rr.value(), 0.8);
    }

    #[test]
    fn single_attempt_has_no_retransmission_load() {
        let c = RadioConfig {
            n_rmax: 1,
            ..Default::default()
        };
        let r = reservation_probability(&c).unwrap();
        assert_eq!(r.lambda_tot, c.lambda_access());
    }

    #[test]
    fn fixed_point_is_self_consistent() {
        let c = RadioConfig {
            lambda_s: 4.0,
            lambda_b: 3.0,
            lambda_d: 3.0,
            p_d: 0.9,
            ..Default::default()
        };
        let r = reservation_probability(&c).unwrap();
        let fail = 1.0 - r.p_rr.value();
        let rebuilt: f64 = (0..c.n_rmax)
            .map(|l| c.lambda_access() * fail.powi(l as i32))
            .sum();
        assert!((rebuilt - r.lambda_tot).abs() < 1e-8);
        assert!(r.lambda_tot >= c.lambda_access());
    }

    #[test]
    fn rr_latency_hand_cases() {
        let c = RadioConfig::default();
        let base = latency_ra(&c) + latency_rar(&c);
        assert!((latency_rr(&c, Probability::ONE).unwrap().value() - base).abs() < 1e-15);
        let one = RadioConfig {
            n_rmax: 1,
            ..c.clone()
        };
        let p = Probability::new(0.3).unwrap();
        assert!((latency_rr(&one, p).unwrap().value() - 0.3 * base).abs() < 1e-15);
    }

    #[test]
    fn rr_latency_two_terms_by_hand() {
        // t = 1, tau = 0.5 and no downlink wait give L_ra + L_rar = 1
        let c = RadioConfig {
            t: 1.0,
            tau: 0.5,
            d: 0.0,
            u: 0.0,
            n_rmax: 2,
            ..Default::default()
        };
        assert!((latency_ra(&c) + latency_rar(&c) - 1.0).abs() < 1e-15);
        let l = latency_rr(&c, Probability::new(0.5).unwrap())
            .unwrap()
            .value();
        assert!((l - 1.0).abs() < 1e-15);
    }
}
