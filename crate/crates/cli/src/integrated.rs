//! Learning sub-tasks placed on a device network, trained with group ADMM,
//! and published to the ledger.

use iiot_energy::learning::{Role, TrainingTrace};
use iiot_energy::placement::{
    generate_network, solve_heuristic, AppComponent, AppGraph, AppShape, Assignment, NetGraph,
};
use iiot_energy::radio::LatencyEnergyBreakdown;
use iiot_energy::Seed;

use crate::error::RunError;
use crate::learn::LearningSetup;
use crate::radio::radio_breakdown;
use crate::scenario::{ComponentSpec, Config};
use crate::table::{num, Table};

const NETWORK_TAG: u64 = 5;

pub const INTEGRATED_HEADER: [&str; 7] = [
    "iter",
    "objective_error",
    "learning_joules_cum",
    "records_cum",
    "record_latency_s",
    "ledger_joules_cum",
    "total_cum",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subtask {
    /// Shared source feeding every training component.
    DataProcessing,
    /// Local training of a tail worker.
    Training { worker: usize },
    /// Model aggregation on a head worker.
    Aggregation { worker: usize },
}

impl Subtask {
    pub fn name(self) -> &'static str {
        match self {
            Subtask::DataProcessing => "data",
            Subtask::Training { .. } => "training",
            Subtask::Aggregation { .. } => "aggregation",
        }
    }

    pub fn worker(self) -> Option<usize> {
        match self {
            Subtask::DataProcessing => None,
            Subtask::Training { worker } | Subtask::Aggregation { worker } => Some(worker),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    /// Placement `E_t` of the chosen assignment (model units).
    pub placement: f64,
    pub learning_joules: f64,
    pub records: u64,
    /// Latency and energy of one record; zero with the ledger off.
    pub record_latency_s: f64,
    pub record_joules: f64,
    pub ledger_joules: f64,
    pub total: f64,
}

impl Totals {
    fn new(
        placement: f64,
        learning_joules: f64,
        records: u64,
        record: Option<&LatencyEnergyBreakdown>,
    ) -> Self {
        let (record_latency_s, record_joules) = record
            .map(|b| (b.total_latency().value(), b.total_energy().value()))
            .unwrap_or((0.0, 0.0));
        let ledger_joules = records as f64 * record_joules;
        Self {
            placement,
            learning_joules,
            records,
            record_latency_s,
            record_joules,
            ledger_joules,
            total: placement + learning_joules + ledger_joules,
        }
    }

    /// `total = placement + learning + records · per-record energy`.
    pub fn balanced(&self) -> bool {
        self.total
            == self.placement + self.learning_joules + self.records as f64 * self.record_joules
    }
}

#[derive(Debug, Clone)]
pub struct IntegratedReport {
    pub app: AppGraph,
    pub net: NetGraph,
    /// `subtasks[t]` is the role of component `t`.
    pub subtasks: Vec<Subtask>,
    pub assignment: Assignment,
    pub trace: TrainingTrace,
    /// Per-record breakdown, `None` with the ledger off.
    pub record: Option<LatencyEnergyBreakdown>,
    pub ledger_period: usize,
    pub totals: Totals,
}

impl IntegratedReport {
    /// Whether iteration `k` (1-based) publishes a record.
    pub fn publishes(&self, k: usize) -> bool {
        self.record.is_some() && k.is_multiple_of(self.ledger_period)
    }

    pub fn iteration_table(&self) -> Table {
        let mut t = Table::new(&INTEGRATED_HEADER);
        let (latency, energy) = (self.totals.record_latency_s, self.totals.record_joules);
        let mut records = 0u64;
        for r in &self.trace.records {
            let published = self.publishes(r.iteration);
            records += published as u64;
            let ledger = records as f64 * energy;
            t.push(vec![
                r.iteration.to_string(),
                num(r.objective_error),
                num(r.joules.value()),
                records.to_string(),
                num(if published { latency } else { 0.0 }),
                num(ledger),
                num(self.totals.placement + r.joules.value() + ledger),
            ]);
        }
        t
    }

    pub fn placement_table(&self) -> Table {
        let mut t = Table::new(&["component", "subtask", "worker", "node"]);
        for (c, (s, &n)) in self
            .subtasks
            .iter()
            .zip(&self.assignment.placement)
            .enumerate()
        {
            t.push(vec![
                c.to_string(),
                s.name().into(),
                s.worker().map(|w| w.to_string()).unwrap_or_default(),
                n.to_string(),
            ]);
        }
        t
    }

    pub fn summary_table(&self) -> Table {
        let x = &self.totals;
        let last = self.trace.last();
        let mut t = Table::new(&["quantity", "value"]);
        for (k, v) in [
            ("placement_energy", num(x.placement)),
            (
                "placement_device_energy",
                num(self.assignment.device_energy),
            ),
            (
                "placement_network_energy",
                num(self.assignment.network_energy),
            ),
            ("iterations", last.iteration.to_string()),
            ("final_objective_error", num(last.objective_error)),
            ("learning_joules", num(x.learning_joules)),
            ("ledger_records", x.records.to_string()),
            ("record_latency_s", num(x.record_latency_s)),
            ("record_joules", num(x.record_joules)),
            (
                "ledger_latency_s",
                num(x.records as f64 * x.record_latency_s),
            ),
            ("ledger_joules", num(x.ledger_joules)),
            ("total", num(x.total)),
        ] {
            t.push(vec![k.into(), v]);
        }
        t
    }
}

/// One data-processing source, one training component per tail worker and
/// one aggregation component per head worker. Data feeds every training
/// component; training feeds the aggregators its worker is constrained to.
pub fn learning_application(
    roles: &[Role],
    edges: &[(usize, usize)],
    spec: &crate::scenario::IntegratedSpec,
) -> (AppGraph, Vec<Subtask>) {
    let component = |c: ComponentSpec| AppComponent {
        resources: c.resources,
        output: c.output,
        compute: c.compute,
    };
    let mut subtasks = vec![Subtask::DataProcessing];
    let mut components = vec![component(spec.data)];
    let mut index = vec![0; roles.len()];
    for (w, role) in roles.iter().enumerate() {
        index[w] = subtasks.len();
        match role {
            Role::Tail => {
                subtasks.push(Subtask::Training { worker: w });
                components.push(component(spec.training));
            }
            Role::Head => {
                subtasks.push(Subtask::Aggregation { worker: w });
                components.push(component(spec.aggregation));
            }
        }
    }
    let mut app_edges: Vec<(usize, usize)> = (0..roles.len())
        .filter(|&w| roles[w] == Role::Tail)
        .map(|w| (0, index[w]))
        .collect();
    for &(a, b) in edges {
        let (tail, head) = if roles[a] == Role::Tail {
            (a, b)
        } else {
            (b, a)
        };
        app_edges.push((index[tail], index[head]));
    }
    let app = AppGraph::new(components, app_edges, AppShape::Custom)
        .expect("component specs are validated");
    (app, subtasks)
}

pub fn run_integrated(cfg: &Config) -> Result<IntegratedReport, RunError> {
    let seed = Seed(cfg.seed);
    let learning = |source| RunError::Learning {
        context: format!("learning ({})", cfg.learning.variant),
        source,
    };
    let setup = LearningSetup::new(&cfg.learning, seed).map_err(learning)?;
    let edges: Vec<(usize, usize)> = setup
        .topology
        .edges()
        .iter()
        .map(|e| (e.left, e.right))
        .collect();
    let (app, subtasks) = learning_application(setup.topology.roles(), &edges, &cfg.integrated);

    let placement = |source| RunError::Placement {
        context: format!(
            "placing {} learning sub-tasks on {} nodes",
            subtasks.len(),
            cfg.integrated.nodes
        ),
        source,
    };
    let net =
        generate_network(cfg.integrated.nodes, seed.derive(NETWORK_TAG)).map_err(placement)?;
    let assignment = solve_heuristic(&app, &net).map_err(placement)?;

    let trace = setup.run().map_err(learning)?;

    let record = if cfg.integrated.ledger {
        Some(radio_breakdown(cfg).map_err(|source| RunError::Radio {
            context: "ledger record".into(),
            source,
        })?)
    } else {
        None
    };
    let records = if record.is_some() {
        (trace.records.len() / cfg.integrated.ledger_period) as u64
    } else {
        0
    };
    let totals = Totals::new(
        assignment.total_energy,
        trace.last().joules.value(),
        records,
        record.as_ref(),
    );
    Ok(IntegratedReport {
        app,
        net,
        subtasks,
        assignment,
        trace,
        record,
        ledger_period: cfg.integrated.ledger_period,
        totals,
    })
}
