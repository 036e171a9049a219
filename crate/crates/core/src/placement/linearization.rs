//! The 0/1 matrix form of a placement and the linearized product `Y`.
//!
//! `X[t][n] = 1` iff component `t` runs on node `n`, and
//! `Y[t1,t2,n1,n2] = X[t1][n1]·X[t2][n2]` is linearized by
//! `Y ≤ X[t1][n1]`, `Y ≤ X[t2][n2]` and `Y ≥ X[t1][n1] + X[t2][n2] - 1`.

use super::model::{AppGraph, NetGraph};

pub type XMatrix = Vec<Vec<u8>>;

pub fn x_matrix(placement: &[usize], nodes: usize) -> XMatrix {
    placement
        .iter()
        .map(|&p| (0..nodes).map(|n| u8::from(n == p)).collect())
        .collect()
}

/// `Y` as the exact product of `X` entries.
pub fn implied_y(x: &XMatrix, t1: usize, t2: usize, n1: usize, n2: usize) -> u8 {
    x[t1][n1] * x[t2][n2]
}

/// Checks the three linearization inequalities for `y` over every index.
pub fn satisfies_linearization(x: &XMatrix, y: impl Fn(usize, usize, usize, usize) -> u8) -> bool {
    let (n, m) = (x.len(), x.first().map_or(0, Vec::len));
    for t1 in 0..n {
        for t2 in 0..n {
            for n1 in 0..m {
                for n2 in 0..m {
                    let (a, b, v) = (x[t1][n1] as i32, x[t2][n2] as i32, y(t1, t2, n1, n2) as i32);
                    if v > a || v > b || v < a + b - 1 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Each component is placed exactly once.
pub fn assigns_once(x: &XMatrix) -> bool {
    x.iter()
        .all(|row| row.iter().map(|&v| v as u32).sum::<u32>() == 1)
}

/// Per-node demand within capacity.
pub fn within_capacity(app: &AppGraph, net: &NetGraph, x: &XMatrix) -> bool {
    (0..net.len()).all(|n| {
        let demand: u64 = (0..app.len())
            .map(|t| x[t][n] as u64 * app.components()[t].resources as u64)
            .sum();
        demand <= net.nodes()[n].resources as u64
    })
}

/// Network energy written over `Y`: `Σ_(t1,t2) Σ_(n1,n2) O_t1·D(n1,n2)·Y`.
pub fn network_energy_via_y(app: &AppGraph, net: &NetGraph, x: &XMatrix) -> f64 {
    let m = net.len();
    let mut total = 0.0;
    for &(t1, t2) in app.edges() {
        for n1 in 0..m {
            for n2 in 0..m {
                let y = implied_y(x, t1, t2, n1, n2);
                if y == 1 {
                    total += app.components()[t1].output * net.distance(n1, n2);
                }
            }
        }
    }
    total
}
