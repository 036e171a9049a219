use super::evaluate::{device_cost, evaluate_assignment};
use super::model::{AppGraph, Assignment, NetGraph};
use super::search::{branch_and_bound, Objective, Outcome};
use super::{check_total_capacity, PlacementError};

/// `c[t][n] = C_n·S_t/P_n + O_t·T̂_n`, the separable per-pair cost.
pub fn heuristic_costs(app: &AppGraph, net: &NetGraph) -> Vec<Vec<f64>> {
    (0..app.len())
        .map(|t| {
            (0..net.len())
                .map(|n| {
                    device_cost(app, net, t, n)
                        + app.components()[t].output * net.mean_link_energy(n)
                })
                .collect()
        })
        .collect()
}

/// Placement minimizing the separable cost under the resource limits,
/// solved exactly; the returned energies use the true pairwise objective.
pub fn solve_heuristic(app: &AppGraph, net: &NetGraph) -> Result<Assignment, PlacementError> {
    check_total_capacity(app, net)?;
    let obj = Objective {
        app,
        net,
        unary: heuristic_costs(app, net),
        pairwise: false,
    };
    match branch_and_bound(&obj, f64::INFINITY, None) {
        Outcome::Finished(Some((_, placement))) => evaluate_assignment(app, net, &placement),
        _ => Err(PlacementError::Infeasible(
            "no placement satisfies the resource limits".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::model::{AppComponent, AppShape, NetLink, NetNode, NodeKind};
    use crate::placement::{generate_instance, solve_optimal};
    use crate::rng::Seed;

    #[test]
    fn single_node_matches_optimal() {
        let c = AppComponent {
            resources: 1,
            output: 1.2,
            compute: 2.0,
        };
        let app = AppGraph::new(
            vec![c.clone(), c.clone(), c],
            vec![(0, 1), (1, 2)],
            AppShape::Long,
        )
        .unwrap();
        let net = NetGraph::new(
            vec![NetNode {
                speedup: 2.0,
                resources: 3,
                energy_per_unit: 0.7,
                kind: NodeKind::Wireless,
            }],
            vec![],
        )
        .unwrap();
        let h = solve_heuristic(&app, &net).unwrap();
        let o = solve_optimal(&app, &net, None).unwrap();
        assert_eq!(h, o);
        assert_eq!(h.network_energy, 0.0);
    }

    #[test]
    fn mean_link_cost_enters_the_separable_cost() {
        let c = AppComponent {
            resources: 1,
            output: 2.0,
            compute: 1.0,
        };
        let app = AppGraph::new(vec![c], vec![], AppShape::Custom).unwrap();
        let n = NetNode {
            speedup: 1.0,
            resources: 1,
            energy_per_unit: 1.0,
            kind: NodeKind::Wired,
        };
        let net = NetGraph::new(
            vec![n.clone(), n.clone(), n],
            vec![
                NetLink {
                    a: 0,
                    b: 1,
                    energy: 0.2,
                },
                NetLink {
                    a: 0,
                    b: 2,
                    energy: 0.8,
                },
            ],
        )
        .unwrap();
        let c = heuristic_costs(&app, &net);
        assert!((c[0][0] - 2.0).abs() < 1e-12);
        assert!((c[0][1] - 1.4).abs() < 1e-12);
        assert_eq!(solve_heuristic(&app, &net).unwrap().placement, vec![1]);
    }

    #[test]
    fn never_beats_optimal() {
        for s in 0..30 {
            let (app, net, _) = generate_instance(AppShape::Wide, 6, 6, Seed(s)).unwrap();
            let (Ok(h), Ok(o)) = (solve_heuristic(&app, &net), solve_optimal(&app, &net, None))
            else {
                continue;
            };
            assert!(o.total_energy <= h.total_energy + 1e-12, "seed {s}");
        }
    }
}
