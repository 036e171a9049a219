use iiot_energy::placement::linearization::{implied_y, satisfies_linearization, x_matrix};
use iiot_energy::placement::*;
use iiot_energy::Seed;
use proptest::prelude::*;

fn shape(s: u64) -> AppShape {
    if s.is_multiple_of(2) {
        AppShape::Wide
    } else {
        AppShape::Long
    }
}

#[test]
fn golden_instance() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/instance.toml");
    let inst = Instance::load(path).unwrap();
    assert_eq!(inst.app.len(), 3);
    assert_eq!(inst.net.len(), 3);
    assert_eq!(inst.app.edges(), &[(0, 1), (1, 2)]);
    assert!((inst.net.distance(0, 2) - 1.0).abs() < 1e-15);
    assert_eq!(
        Instance::from_toml_str(&inst.to_toml_string().unwrap()).unwrap(),
        inst
    );

    // t1 on the wireless node, t2 and t3 together on the fast wired node:
    // E_d = 0.25 + 1 + 0.5, E_n = 1.0 * 0.8
    let best = solve_optimal(&inst.app, &inst.net, None).unwrap();
    assert_eq!(best.placement, vec![2, 1, 1]);
    assert!((best.device_energy - 1.75).abs() < 1e-12);
    assert!((best.network_energy - 0.8).abs() < 1e-12);
    assert_eq!(best, brute_force_optimal(&inst.app, &inst.net).unwrap());
}

#[test]
fn exact_matches_brute_force() {
    for s in 0..200u64 {
        let n = 3 + (s % 3) as usize;
        let m = 2 + (s % 4) as usize;
        let (app, net, _) = generate_instance(shape(s), n, m, Seed(s)).unwrap();
        let exact = solve_optimal(&app, &net, None).unwrap();
        let brute = brute_force_optimal(&app, &net).unwrap();
        assert!(
            (exact.total_energy - brute.total_energy).abs() <= 1e-9,
            "seed {s}"
        );
    }
}

#[test]
fn optimum_dominates_heuristic_and_random_placements() {
    let (mut samples, mut heuristic_wins) = (0u32, 0u32);
    for s in 0..100u64 {
        let (app, net, _) = generate_instance(
            shape(s),
            3 + (s % 6) as usize,
            5 + (s % 6) as usize,
            Seed(1000 + s),
        )
        .unwrap();
        let opt = solve_optimal(&app, &net, None).unwrap();
        let heur = solve_heuristic(&app, &net).unwrap();
        assert!(opt.total_energy <= heur.total_energy + 1e-12, "seed {s}");
        let mut rng = Seed(s).derive(1).rng();
        for _ in 0..50 {
            let p: Vec<usize> = (0..app.len())
                .map(|_| rng.below(net.len() as u64) as usize)
                .collect();
            if let Ok(a) = evaluate_assignment(&app, &net, &p) {
                assert!(opt.total_energy <= a.total_energy + 1e-12);
                samples += 1;
                heuristic_wins += u32::from(heur.total_energy <= a.total_energy);
            }
        }
    }
    // the heuristic ignores pairwise distances, so it is not dominant on every sample
    assert!(samples > 100);
    assert!(
        heuristic_wins as f64 >= 0.8 * samples as f64,
        "{heuristic_wins}/{samples}"
    );
}

#[test]
fn heuristic_gap_is_moderate() {
    let mut ratios: Vec<f64> = (0..100u64)
        .map(|s| {
            let (app, net, _) = generate_instance(
                shape(s),
                3 + (s % 6) as usize,
                5 + (s % 6) as usize,
                Seed(s),
            )
            .unwrap();
            solve_optimal(&app, &net, None).unwrap().total_energy
                / solve_heuristic(&app, &net).unwrap().total_energy
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    let median = 0.5 * (ratios[49] + ratios[50]);
    assert!((0.5..=1.0).contains(&median), "{median}");
}

#[test]
fn brute_force_refuses_large_instances() {
    let (app, net, _) = generate_instance(AppShape::Long, 8, 10, Seed(0)).unwrap();
    assert!(matches!(
        brute_force_optimal(&app, &net),
        Err(PlacementError::TooLarge { .. })
    ));
}

#[test]
fn solvers_are_deterministic() {
    let (app, net, _) = generate_instance(AppShape::Wide, 8, 9, Seed(77)).unwrap();
    let a = solve_optimal(&app, &net, None).unwrap();
    for _ in 0..5 {
        assert_eq!(solve_optimal(&app, &net, None).unwrap(), a);
    }
}

fn relabel(net: &NetGraph, perm: &[usize]) -> NetGraph {
    let mut nodes = net.nodes().to_vec();
    for (old, node) in net.nodes().iter().enumerate() {
        nodes[perm[old]] = node.clone();
    }
    let links = net
        .links()
        .iter()
        .map(|l| NetLink {
            a: perm[l.a],
            b: perm[l.b],
            energy: l.energy,
        })
        .collect();
    NetGraph::new(nodes, links).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_relabeling_equivariant(
        seed in 0u64..500,
        perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
        raw in prop::collection::vec(0usize..6, 5),
    ) {
        let (app, net, _) = generate_instance(AppShape::Wide, 5, 6, Seed(seed)).unwrap();
        let moved = relabel(&net, &perm);
        let mapped: Vec<usize> = raw.iter().map(|&n| perm[n]).collect();
        let energy = |r: Result<Assignment, PlacementError>| match r {
            Ok(a) => Some(a.total_energy),
            Err(PlacementError::ResourceExceeded { evaluated, .. }) => Some(-evaluated.total_energy),
            Err(_) => None,
        };
        let (a, b) = (energy(evaluate_assignment(&app, &net, &raw)), energy(evaluate_assignment(&app, &moved, &mapped)));
        prop_assert!((a.unwrap() - b.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn optimal_placements_satisfy_the_linearization(seed in 0u64..300) {
        let (app, net, _) = generate_instance(AppShape::Long, 4, 4, Seed(seed)).unwrap();
        let best = solve_optimal(&app, &net, None).unwrap();
        let x = x_matrix(&best.placement, net.len());
        prop_assert!(satisfies_linearization(&x, |a, b, c, d| implied_y(&x, a, b, c, d)));
    }
}
