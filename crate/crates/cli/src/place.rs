//! Optimal-versus-heuristic placement batches.

use std::path::Path;
use std::time::{Duration, Instant};

use iiot_energy::exec;
use iiot_energy::placement::{
    generate_instance, solve_heuristic, solve_optimal, Instance, PlacementError,
};
use iiot_energy::placement::{AppGraph, NetGraph};
use iiot_energy::Seed;

use crate::error::RunError;
use crate::scenario::PlacementSpec;
use crate::table::{num, Table};

pub const PLACEMENT_HEADER: [&str; 7] = [
    "seed",
    "E_opt",
    "E_heur",
    "ratio",
    "t_opt_ms",
    "t_heur_ms",
    "gap",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementRow {
    pub seed: u64,
    /// Optimal `E_t`, or the best incumbent when the time budget ran out.
    pub optimal: f64,
    pub heuristic: f64,
    /// Relative optimality gap of `optimal`; 0 when proven optimal.
    pub gap: f64,
    pub optimal_time: Option<Duration>,
    pub heuristic_time: Option<Duration>,
}

impl PlacementRow {
    pub fn ratio(&self) -> f64 {
        self.optimal / self.heuristic
    }
}

/// One row per instance: the file instance when given, otherwise generated
/// instances with seeds `seed, seed + 1, ...`.
pub fn run_placement(
    spec: &PlacementSpec,
    seed: u64,
    dir: &Path,
) -> Result<Vec<PlacementRow>, RunError> {
    let budget = spec.time_budget_s.map(Duration::from_secs_f64);
    if let Some(file) = &spec.instance {
        let path = dir.join(file);
        let inst = Instance::load(&path).map_err(|source| RunError::Instance {
            context: format!("placement.instance {}", path.display()),
            source,
        })?;
        return Ok(vec![solve_row(
            &inst.app,
            &inst.net,
            seed,
            budget,
            spec.timing,
        )?]);
    }
    let row = |i: usize| -> Result<PlacementRow, RunError> {
        let s = seed.wrapping_add(i as u64);
        let context = || format!("placement instance seed {s}");
        let (app, net, _) = generate_instance(spec.shape, spec.components, spec.nodes, Seed(s))
            .map_err(|source| RunError::Placement {
                context: context(),
                source,
            })?;
        solve_row(&app, &net, s, budget, spec.timing)
    };
    let n = spec.instances as usize;
    // Timed rows run one at a time so they do not compete for cores.
    let rows = if spec.timing {
        (0..n).map(row).collect()
    } else {
        exec::map_indexed(n, row)
    };
    rows.into_iter().collect()
}

fn solve_row(
    app: &AppGraph,
    net: &NetGraph,
    seed: u64,
    budget: Option<Duration>,
    timing: bool,
) -> Result<PlacementRow, RunError> {
    let err = |source| RunError::Placement {
        context: format!("placement instance seed {seed}"),
        source,
    };
    let start = Instant::now();
    let heuristic = solve_heuristic(app, net).map_err(err)?;
    let heuristic_time = start.elapsed();
    let start = Instant::now();
    let (optimal, gap) = match solve_optimal(app, net, budget) {
        Ok(a) => (a.total_energy, 0.0),
        Err(PlacementError::TimeBudgetExceeded {
            incumbent: Some(a),
            gap,
            ..
        }) => (a.total_energy, gap),
        Err(e) => return Err(err(e)),
    };
    let optimal_time = start.elapsed();
    Ok(PlacementRow {
        seed,
        optimal,
        heuristic: heuristic.total_energy,
        gap,
        optimal_time: timing.then_some(optimal_time),
        heuristic_time: timing.then_some(heuristic_time),
    })
}

pub fn placement_table(rows: &[PlacementRow]) -> Table {
    let ms = |d: Option<Duration>| d.map(|d| num(d.as_secs_f64() * 1e3)).unwrap_or_default();
    let mut t = Table::new(&PLACEMENT_HEADER);
    for r in rows {
        t.push(vec![
            r.seed.to_string(),
            num(r.optimal),
            num(r.heuristic),
            num(r.ratio()),
            ms(r.optimal_time),
            ms(r.heuristic_time),
            num(r.gap),
        ]);
    }
    t
}
