use super::evaluate::energies;
use super::model::{AppGraph, Assignment, NetGraph};
use super::PlacementError;

/// Largest `M^N` that `brute_force_optimal` enumerates.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Exhaustive minimum-`E_t` placement. Placements are enumerated in
/// lexicographic order of `(X(0), X(1), ...)`; the first minimum is kept.
pub fn brute_force_optimal(app: &AppGraph, net: &NetGraph) -> Result<Assignment, PlacementError> {
    let (n, m) = (app.len(), net.len());
    let too_large = PlacementError::TooLarge {
        nodes: m,
        components: n,
    };
    let count = (m as u64).checked_pow(n as u32).ok_or(too_large.clone())?;
    if count > BRUTE_FORCE_LIMIT {
        return Err(too_large);
    }
    let mut placement = vec![0usize; n];
    let mut best: Option<Assignment> = None;
    for _ in 0..count {
        if fits(app, net, &placement) {
            let a = energies(app, net, &placement);
            if best
                .as_ref()
                .is_none_or(|b| a.total_energy < b.total_energy)
            {
                best = Some(a);
            }
        }
        // odometer increment, last component fastest
        for digit in placement.iter_mut().rev() {
            *digit += 1;
            if *digit < m {
                break;
            }
            *digit = 0;
        }
    }
    best.ok_or_else(|| {
        PlacementError::Infeasible("no placement satisfies the resource limits".into())
    })
}

fn fits(app: &AppGraph, net: &NetGraph, placement: &[usize]) -> bool {
    let mut load = vec![0u64; net.len()];
    for (t, &n) in placement.iter().enumerate() {
        load[n] += app.components()[t].resources as u64;
    }
    load.iter()
        .zip(net.nodes())
        .all(|(&l, node)| l <= node.resources as u64)
}
