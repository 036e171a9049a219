use super::model::{AppGraph, Assignment, NetGraph};
use super::PlacementError;

/// `C_n·S_t / P_n`.
pub fn device_cost(app: &AppGraph, net: &NetGraph, t: usize, n: usize) -> f64 {
    let node = &net.nodes()[n];
    node.energy_per_unit * app.components()[t].compute / node.speedup
}

/// Device, network and total energy of `placement`.
///
/// `E_d = Σ_t C_X(t)·S_t/P_X(t)`, `E_n = Σ_(t1,t2) O_t1·D(X(t1), X(t2))`.
/// Over-committed nodes yield `ResourceExceeded` with the energies attached;
/// the lowest offending node id is reported.
pub fn evaluate_assignment(
    app: &AppGraph,
    net: &NetGraph,
    placement: &[usize],
) -> Result<Assignment, PlacementError> {
    if placement.len() != app.len() {
        return Err(PlacementError::LengthMismatch {
            expected: app.len(),
            found: placement.len(),
        });
    }
    if let Some(&n) = placement.iter().find(|&&n| n >= net.len()) {
        return Err(PlacementError::InvalidInstance(format!(
            "node {n} does not exist"
        )));
    }
    let assignment = energies(app, net, placement);
    let mut load = vec![0u64; net.len()];
    for (t, &n) in placement.iter().enumerate() {
        load[n] += app.components()[t].resources as u64;
    }
    for (n, (&demand, node)) in load.iter().zip(net.nodes()).enumerate() {
        if demand > node.resources as u64 {
            return Err(PlacementError::ResourceExceeded {
                node: n,
                demand,
                capacity: node.resources,
                evaluated: Box::new(assignment),
            });
        }
    }
    Ok(assignment)
}

/// Energies without the resource check. Summation order is fixed so every
/// solver reports bit-identical totals for the same placement.
pub(crate) fn energies(app: &AppGraph, net: &NetGraph, placement: &[usize]) -> Assignment {
    let device_energy: f64 = placement
        .iter()
        .enumerate()
        .map(|(t, &n)| device_cost(app, net, t, n))
        .sum();
    let network_energy: f64 = app
        .edges()
        .iter()
        .map(|&(a, b)| app.components()[a].output * net.distance(placement[a], placement[b]))
        .sum();
    Assignment {
        placement: placement.to_vec(),
        device_energy,
        network_energy,
        total_energy: device_energy + network_energy,
    }
}
