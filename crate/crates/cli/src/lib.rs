//! Scenario runner for the `iiot-energy` models.
//!
//! A scenario file names one experiment kind, its config blocks and an
//! optional sweep over one parameter (see [`scenario`]). [`render`] turns it
//! into in-memory CSV tables; [`run_scenario`] writes them to the scenario's
//! output directory. Both are pure functions of the scenario text and seed,
//! except for the optional wall-time columns of placement reports.
//!
//! Reports, one file per sweep point unless noted:
//!
//! | kind | file | columns |
//! |------|------|---------|
//! | learning | `learning.csv` | `iter, objective, objective_error, bits_cum, joules_cum, censored_cum` |
//! | placement | `placement.csv` | `seed, E_opt, E_heur, ratio, t_opt_ms, t_heur_ms, gap` |
//! | radio-dlt | `radio.csv`, one row per point | swept parameter (or `point`), `L_total, E_total`, `L_<term>, E_<term>` per term, `P_rr, lambda_tot` |
//! | integrated | `integrated.csv` | `iter, objective_error, learning_joules_cum, records_cum, record_latency_s, ledger_joules_cum, total_cum` |
//! | integrated | `integrated_placement.csv` | `component, subtask, worker, node` |
//! | integrated | `integrated_summary.csv` | `quantity, value` |
//!
//! With a sweep, file stems gain `_<field>=<value>`, e.g. `learning_rho=0.5.csv`.

pub mod error;
pub mod integrated;
pub mod learn;
pub mod place;
pub mod radio;
pub mod scenario;
pub mod table;

use std::path::PathBuf;

use iiot_energy::exec;
use iiot_energy::Seed;

pub use error::{CliError, FieldError, RunError, ScenarioError};
pub use integrated::{run_integrated, IntegratedReport, Subtask, Totals};
pub use scenario::{parse_scenario, Config, Kind, Point, Scenario};
pub use table::{num, Table};

/// Builds every report of `scenario`, as `(file name, table)` in a fixed
/// order. Sweep points run in parallel.
pub fn render(scenario: &Scenario) -> Result<Vec<(String, Table)>, RunError> {
    let points = scenario.points();
    let sweep = scenario.sweep();
    let suffix = |p: &Point| match sweep {
        Some(s) => format!(
            "_{}={}",
            s.parameter.rsplit('.').next().unwrap_or_default(),
            p.label
        ),
        None => String::new(),
    };
    let context = |p: &Point| match sweep {
        Some(s) => format!("{}={}", s.parameter, p.label),
        None => scenario.kind().name().to_string(),
    };
    if scenario.kind() == Kind::RadioDlt {
        let first = sweep.map(|s| s.parameter.as_str()).unwrap_or("point");
        let mut table = Table::new(&radio::radio_header(first));
        let breakdowns = exec::map_slice(points, |p| radio::radio_breakdown(&p.config));
        for (i, (p, b)) in points.iter().zip(breakdowns).enumerate() {
            let b = b.map_err(|source| RunError::Radio {
                context: context(p),
                source,
            })?;
            let first = if sweep.is_some() {
                p.label.clone()
            } else {
                i.to_string()
            };
            radio::push_radio_row(&mut table, first, &b);
        }
        return Ok(vec![("radio.csv".into(), table)]);
    }
    let per_point = exec::map_slice(points, |p| -> Result<Vec<(String, Table)>, RunError> {
        let cfg = &p.config;
        let sfx = suffix(p);
        Ok(match cfg.kind {
            Kind::Learning => {
                let learning = |source| RunError::Learning {
                    context: context(p),
                    source,
                };
                let setup =
                    learn::LearningSetup::new(&cfg.learning, Seed(cfg.seed)).map_err(learning)?;
                let trace = setup.run().map_err(learning)?;
                vec![(format!("learning{sfx}.csv"), learn::trace_table(&trace))]
            }
            Kind::Placement => {
                let rows = place::run_placement(&cfg.placement, cfg.seed, scenario.dir())?;
                vec![(format!("placement{sfx}.csv"), place::placement_table(&rows))]
            }
            Kind::Integrated => {
                let report = run_integrated(cfg)?;
                vec![
                    (format!("integrated{sfx}.csv"), report.iteration_table()),
                    (
                        format!("integrated{sfx}_placement.csv"),
                        report.placement_table(),
                    ),
                    (
                        format!("integrated{sfx}_summary.csv"),
                        report.summary_table(),
                    ),
                ]
            }
            Kind::RadioDlt => unreachable!("handled above"),
        })
    });
    let mut out = Vec::new();
    for tables in per_point {
        out.extend(tables?);
    }
    Ok(out)
}

/// Writes every report of `scenario` into its output directory and returns
/// the written paths.
pub fn run_scenario(scenario: &Scenario) -> Result<Vec<PathBuf>, RunError> {
    let tables = render(scenario)?;
    let dir = scenario.output();
    std::fs::create_dir_all(&dir).map_err(|source| RunError::Write {
        path: dir.clone(),
        source,
    })?;
    let mut written = Vec::with_capacity(tables.len());
    for (name, table) in tables {
        let path = dir.join(name);
        table.write(&path).map_err(|source| RunError::Write {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
