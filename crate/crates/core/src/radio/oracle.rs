//! Monte-Carlo oracles for the closed forms.

use crate::exec;
use crate::rng::{Seed, SimRng};
use crate::units::Probability;

use super::config::RadioConfig;
use super::RadioError;

/// Retransmissions wait a uniform `1..=BACKOFF_WINDOW` periods.
pub const BACKOFF_WINDOW: u64 = 10;
/// Share of each replica's periods discarded as warm-up.
pub const WARMUP_FRACTION: f64 = 0.1;
const POW_CHUNK: u64 = 1 << 16;
const RESERVATION_REPLICA: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    pub samples: u64,
}

/// Mean of `min` over `miners` independent `Exp(lambda_c)` draws.
///
/// Trials run in chunks of 65536, each on the stream `seed.derive(chunk)`;
/// chunk sums are combined in chunk order.
pub fn pow_latency_oracle(
    miners: u32,
    lambda_c: f64,
    trials: u64,
    seed: Seed,
) -> MonteCarloEstimate {
    assert!(miners >= 1 && trials >= 1 && lambda_c > 0.0);
    let chunks = exec::chunks(trials, POW_CHUNK);
    let sums = exec::map_indexed(chunks.len(), |i| {
        let (_, len) = chunks[i];
        let mut rng = seed.derive(i as u64).rng();
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            let w = (0..miners)
                .map(|_| rng.exponential(lambda_c))
                .fold(f64::INFINITY, f64::min);
            s += w;
            s2 += w * w;
        }
        (s, s2)
    });
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials as f64;
    let mean = s / n;
    let var = if trials > 1 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    MonteCarloEstimate {
        mean,
        std_error: (var / n).sqrt(),
        samples: trials,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservationEstimate {
    pub p_rr: Probability,
    pub attempts: u64,
    pub successes: u64,
}

/// Slotted random-access simulation.
///
/// Each period, `Poisson(λ^a)` new devices and the retransmitters due in that
/// period each pick one of `K` preambles. A device succeeds iff nobody else
/// picked its preamble and a `p_d` coin succeeds. Failed devices retry after
/// a uniform backoff until `N_rmax` attempts are spent. The estimate is
/// successes per attempt after warm-up. Periods are split over independent
/// replicas of at most 20000 periods, each with its own warm-up.
pub fn monte_carlo_reservation(
    config: &RadioConfig,
    periods: u64,
    seed: Seed,
) -> Result<ReservationEstimate, RadioError> {
    config.validate()?;
    if periods < 1000 {
        return Err(RadioError::InvalidConfig {
            field: "periods",
            reason: format!("must be >= 1000, got {periods}"),
        });
    }
    let replicas = exec::chunks(periods, RESERVATION_REPLICA);
    let counts = exec::map_indexed(replicas.len(), |i| {
        simulate_replica(config, replicas[i].1, seed.derive(i as u64))
    });
    let (attempts, successes) = counts.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let p = if attempts == 0 {
        config.p_d
    } else {
        successes as f64 / attempts as f64
    };
    Ok(ReservationEstimate {
        p_rr: Probability::saturating(p),
        attempts,
        successes,
    })
}

fn simulate_replica(config: &RadioConfig, periods: u64, seed: Seed) -> (u64, u64) {
    let mut rng = seed.rng();
    let warmup = (WARMUP_FRACTION * periods as f64).ceil() as u64;
    let slots = BACKOFF_WINDOW as usize + 1;
    let mut due: Vec<Vec<u32>> = vec![Vec::new(); slots];
    let mut picks = vec![0u32; config.k as usize];
    let mut contenders = Vec::new();
    let mut outcome = Vec::new();
    let (mut attempts, mut successes) = (0, 0);
    for period in 0..periods {
        let slot = (period % slots as u64) as usize;
        contenders.clear();
        contenders.append(&mut due[slot]);
        let fresh = rng.poisson(config.lambda_access());
        contenders.extend(std::iter::repeat_n(1u32, fresh as usize));
        resolve_period(
            contenders.len(),
            config.p_d,
            &mut picks,
            &mut rng,
            &mut outcome,
        );
        if period >= warmup {
            attempts += contenders.len() as u64;
            successes += outcome.iter().filter(|&&ok| ok).count() as u64;
        }
        for (&attempt, &ok) in contenders.iter().zip(&outcome) {
            if !ok && attempt < config.n_rmax {
                let wait = rng.int_inclusive(1, BACKOFF_WINDOW);
                due[(slot + wait as usize) % slots].push(attempt + 1);
            }
        }
    }
    (attempts, successes)
}

/// One period of contention among `n` devices over `picks.len()` preambles;
/// `outcome[i]` is device `i`'s success.
pub(crate) fn resolve_period(
    n: usize,
    p_d: f64,
    picks: &mut [u32],
    rng: &mut SimRng,
    outcome: &mut Vec<bool>,
) {
    picks.iter_mut().for_each(|c| *c = 0);
    let chosen: Vec<usize> = (0..n)
        .map(|_| {
            let p = rng.below(picks.len() as u64) as usize;
            picks[p] += 1;
            p
        })
        .collect();
    outcome.clear();
    outcome.extend(chosen.iter().map(|&p| picks[p] == 1 && rng.bernoulli(p_d)));
}
