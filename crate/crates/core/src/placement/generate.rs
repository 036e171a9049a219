//! Random networks and applications with the evaluation's parameter ranges.

use super::model::{AppComponent, AppGraph, AppShape, NetGraph, NetLink, NetNode, NodeKind};
use super::PlacementError;
use crate::rng::{Seed, SimRng};

pub const WIRED_FRACTION: f64 = 0.6;
pub const P_WIRED_WIRED: f64 = 0.8;
pub const P_WIRELESS_WIRELESS: f64 = 0.5;
pub const P_MIXED: f64 = 0.4;
pub const WIRED_LINK_ENERGY: f64 = 0.2;
pub const WIRELESS_LINK_ENERGY: f64 = 0.8;

const NETWORK_TAG: u64 = 0x4E37;
const APP_TAG: u64 = 0xA990;

/// `M` nodes, `round(0.6·M)` of them wired (positions shuffled). Each pair
/// is linked with probability 0.8 (wired-wired), 0.5 (wireless-wireless) or
/// 0.4 (mixed); a link costs 0.2 if both ends are wired and 0.8 otherwise.
/// `R_n ~ U{1..8}`, `P_n ~ U[1, 3]`, `C_n ~ U[0.5, 1.5]`. Links are re-drawn
/// from the same stream until the graph is connected.
pub fn generate_network(m: usize, seed: Seed) -> Result<NetGraph, PlacementError> {
    if m < 2 {
        return Err(PlacementError::InvalidInstance(format!(
            "network needs at least 2 nodes, got {m}"
        )));
    }
    let mut rng = seed.derive(NETWORK_TAG).rng();
    let wired = (WIRED_FRACTION * m as f64).round() as usize;
    let mut kinds: Vec<NodeKind> = (0..m)
        .map(|i| {
            if i < wired {
                NodeKind::Wired
            } else {
                NodeKind::Wireless
            }
        })
        .collect();
    rng.shuffle(&mut kinds);
    let nodes: Vec<NetNode> = kinds
        .into_iter()
        .map(|kind| NetNode {
            resources: rng.int_inclusive(1, 8) as u32,
            speedup: rng.uniform(1.0, 3.0),
            energy_per_unit: rng.uniform(0.5, 1.5),
            kind,
        })
        .collect();
    loop {
        let links = draw_links(&nodes, &mut rng);
        match NetGraph::new(nodes.clone(), links) {
            Err(PlacementError::Disconnected) => continue,
            other => return other,
        }
    }
}

fn draw_links(nodes: &[NetNode], rng: &mut SimRng) -> Vec<NetLink> {
    let mut links = Vec::new();
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let (p, energy) = match (nodes[a].kind, nodes[b].kind) {
                (NodeKind::Wired, NodeKind::Wired) => (P_WIRED_WIRED, WIRED_LINK_ENERGY),
                (NodeKind::Wireless, NodeKind::Wireless) => {
                    (P_WIRELESS_WIRELESS, WIRELESS_LINK_ENERGY)
                }
                _ => (P_MIXED, WIRELESS_LINK_ENERGY),
            };
            if rng.bernoulli(p) {
                links.push(NetLink { a, b, energy });
            }
        }
    }
    links
}

/// `R_t ~ U{1..8}`, `O_t ~ U[0.5, 1.5]`, `S_t ∈ {1, 2}`.
pub fn generate_application(
    shape: AppShape,
    n: usize,
    seed: Seed,
) -> Result<AppGraph, PlacementError> {
    let edges = match shape {
        AppShape::Long if n >= 2 => (0..n - 1).map(|t| (t, t + 1)).collect(),
        AppShape::Wide if n >= 3 => (1..n - 1).flat_map(|t| [(0, t), (t, n - 1)]).collect(),
        _ => {
            return Err(PlacementError::InvalidShape {
                shape,
                components: n,
            })
        }
    };
    let mut rng = seed.derive(APP_TAG).rng();
    let components = (0..n)
        .map(|_| AppComponent {
            resources: rng.int_inclusive(1, 8) as u32,
            output: rng.uniform(0.5, 1.5),
            compute: rng.int_inclusive(1, 2) as f64,
        })
        .collect();
    AppGraph::new(components, edges, shape)
}

/// A feasible application/network pair.
///
/// Draws `(app, net)` from successive derived seeds until first-fit
/// decreasing packs every component; returns the pair and the index of the
/// accepted attempt.
pub fn generate_instance(
    shape: AppShape,
    components: usize,
    nodes: usize,
    seed: Seed,
) -> Result<(AppGraph, NetGraph, u64), PlacementError> {
    for attempt in 0..10_000u64 {
        let s = seed.derive(attempt);
        let app = generate_application(shape, components, s)?;
        let net = generate_network(nodes, s)?;
        if first_fit_decreasing(&app, &net).is_some() {
            return Ok((app, net, attempt));
        }
    }
    Err(PlacementError::Infeasible(
        "no packable instance in 10000 draws".into(),
    ))
}

/// Components by decreasing `R_t` onto the first node with room.
pub(crate) fn first_fit_decreasing(app: &AppGraph, net: &NetGraph) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..app.len()).collect();
    order.sort_by_key(|&t| (std::cmp::Reverse(app.components()[t].resources), t));
    let mut free: Vec<u32> = net.nodes().iter().map(|n| n.resources).collect();
    let mut placement = vec![0; app.len()];
    for t in order {
        let r = app.components()[t].resources;
        let n = free.iter().position(|&f| f >= r)?;
        free[n] -= r;
        placement[t] = n;
    }
    Some(placement)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_nodes_six_wired() {
        for s in 0..20 {
            let g = generate_network(10, Seed(s)).unwrap();
            let wired = g
                .nodes()
                .iter()
                .filter(|n| n.kind == NodeKind::Wired)
                .count();
            assert_eq!(wired, 6);
        }
    }

    #[test]
    fn link_energies_match_kinds() {
        for s in 0..20 {
            let g = generate_network(12, Seed(s)).unwrap();
            for l in g.links() {
                assert!(l.energy == 0.2 || l.energy == 0.8);
                let both_wired = g.nodes()[l.a].kind == NodeKind::Wired
                    && g.nodes()[l.b].kind == NodeKind::Wired;
                assert_eq!(l.energy == 0.2, both_wired);
            }
        }
    }

    #[test]
    fn parameter_ranges() {
        for s in 0..20 {
            let g = generate_network(15, Seed(s)).unwrap();
            for n in g.nodes() {
                assert!((1..=8).contains(&n.resources));
                assert!((1.0..=3.0).contains(&n.speedup));
                assert!((0.5..=1.5).contains(&n.energy_per_unit));
            }
        }
    }

    #[test]
    fn two_nodes_are_connected() {
        for s in 0..20 {
            let g = generate_network(2, Seed(s)).unwrap();
            assert_eq!(g.links().len(), 1);
            assert!(g.distance(0, 1).is_finite());
        }
    }

    #[test]
    fn long_application_is_a_path() {
        let a = generate_application(AppShape::Long, 4, Seed(1)).unwrap();
        assert_eq!(a.edges(), &[(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn wide_application_fans_out_and_in() {
        let a = generate_application(AppShape::Wide, 5, Seed(1)).unwrap();
        let out_of_start = a.edges().iter().filter(|e| e.0 == 0).count();
        let into_end = a.edges().iter().filter(|e| e.1 == 4).count();
        assert_eq!((out_of_start, into_end), (3, 3));
        assert_eq!(a.edges().len(), 6);
    }

    #[test]
    fn component_ranges() {
        for s in 0..50 {
            let a = generate_application(AppShape::Wide, 8, Seed(s)).unwrap();
            for c in a.components() {
                assert!(c.compute == 1.0 || c.compute == 2.0);
                assert!((1..=8).contains(&c.resources));
                assert!((0.5..=1.5).contains(&c.output));
            }
        }
    }

    #[test]
    fn too_small_shapes() {
        assert!(matches!(
            generate_application(AppShape::Wide, 2, Seed(0)),
            Err(PlacementError::InvalidShape { .. })
        ));
        assert!(generate_application(AppShape::Long, 1, Seed(0)).is_err());
        assert!(generate_application(AppShape::Long, 2, Seed(0)).is_ok());
    }

    #[test]
    fn generated_instances_are_packable() {
        for s in 0..20 {
            let (app, net, _) = generate_instance(AppShape::Long, 8, 5, Seed(s)).unwrap();
            let p = first_fit_decreasing(&app, &net).unwrap();
            assert!(crate::placement::evaluate_assignment(&app, &net, &p).is_ok());
        }
    }
}
