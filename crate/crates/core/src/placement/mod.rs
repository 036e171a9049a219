//! Energy-optimal placement of application components onto device networks.
//!
//! Components and nodes are 0-based in the API; the text instance format
//! uses 1-based ids.

mod brute;
mod evaluate;
mod exact;
mod generate;
mod heuristic;
mod instance;
pub mod linearization;
mod model;
mod search;

use std::time::Duration;

use thiserror::Error;

pub use brute::{brute_force_optimal, BRUTE_FORCE_LIMIT};
pub use evaluate::{device_cost, evaluate_assignment};
pub use exact::solve_optimal;
pub use generate::{generate_application, generate_instance, generate_network};
pub use heuristic::{heuristic_costs, solve_heuristic};
pub use instance::{Instance, InstanceError};
pub use model::{
    AppComponent, AppGraph, AppShape, Assignment, NetGraph, NetLink, NetNode, NodeKind,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlacementError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("{shape:?} application cannot have {components} components")]
    InvalidShape { shape: AppShape, components: usize },
    #[error("network is disconnected")]
    Disconnected,
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// The energies of the offending assignment are kept for diagnostics.
    #[error("node {node} hosts {demand} resource units but has {capacity}")]
    ResourceExceeded {
        node: usize,
        demand: u64,
        capacity: u32,
        evaluated: Box<Assignment>,
    },
    /// `gap` is `(incumbent - lower_bound) / incumbent` at the time of the stop.
    #[error("time budget {budget:?} exceeded (gap {gap})")]
    TimeBudgetExceeded {
        budget: Duration,
        incumbent: Option<Box<Assignment>>,
        gap: f64,
    },
    #[error("{nodes}^{components} assignments exceed the enumeration limit")]
    TooLarge { nodes: usize, components: usize },
    #[error("assignment has {found} entries for {expected} components")]
    LengthMismatch { expected: usize, found: usize },
}

/// Σ R_t ≤ Σ R_n, necessary for any feasible assignment.
fn check_total_capacity(app: &AppGraph, net: &NetGraph) -> Result<(), PlacementError> {
    let (demand, capacity) = (app.total_resources(), net.total_resources());
    if demand > capacity {
        return Err(PlacementError::Infeasible(format!(
            "total demand {demand} exceeds total capacity {capacity}"
        )));
    }
    Ok(())
}
