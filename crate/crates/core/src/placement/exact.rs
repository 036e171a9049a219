use std::time::Duration;

use super::evaluate::evaluate_assignment;
use super::heuristic::solve_heuristic;
use super::model::{AppGraph, Assignment, NetGraph};
use super::search::{branch_and_bound, Objective, Outcome};
use super::{check_total_capacity, PlacementError};

/// Slack on the heuristic warm start so that an optimum equal to it is still
/// reached through the search and obeys the tie-break.
const WARM_START_SLACK: f64 = 1e-9;

/// Minimum-`E_t` placement under the per-node resource limits.
///
/// Branch-and-bound over components in decreasing `R_t` order. The bound is
/// the partial cost plus, per unplaced component, its cheapest device cost.
/// Ties go to the lexicographically first placement in search order, i.e.
/// smallest node ids for the most demanding components. The heuristic
/// solution seeds the upper bound. With `time_budget`, an expired search
/// returns `TimeBudgetExceeded` carrying the best assignment seen.
pub fn solve_optimal(
    app: &AppGraph,
    net: &NetGraph,
    time_budget: Option<Duration>,
) -> Result<Assignment, PlacementError> {
    check_total_capacity(app, net)?;
    let warm = solve_heuristic(app, net)?;
    let obj = Objective::device_only(app, net, true);
    let upper = warm.total_energy * (1.0 + WARM_START_SLACK) + WARM_START_SLACK;
    match branch_and_bound(&obj, upper, time_budget) {
        Outcome::Finished(Some((_, placement))) => evaluate_assignment(app, net, &placement),
        // the warm start was optimal but rounding kept the search from matching it
        Outcome::Finished(None) => Ok(warm),
        Outcome::Stopped { best, root_bound } => {
            let incumbent = match best {
                Some((value, p)) if value < warm.total_energy => evaluate_assignment(app, net, &p)?,
                _ => warm,
            };
            let gap = ((incumbent.total_energy - root_bound) / incumbent.total_energy).max(0.0);
            Err(PlacementError::TimeBudgetExceeded {
                budget: time_budget.unwrap_or_default(),
                incumbent: Some(Box::new(incumbent)),
                gap,
            })
        }
    }
}
