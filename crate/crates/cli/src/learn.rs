//! Standalone learning runs.

use iiot_energy::learning::{
    build_topology, run, CensorSchedule, CommEnergyModel, LearningError, LocalProblem,
    QuantizerConfig, RunConfig, SyntheticRegression, Topology, TopologyKind, TrainingTrace,
    Variant,
};
use iiot_energy::Seed;

use crate::scenario::{LearningSpec, TopologyChoice};
use crate::table::{num, Table};

const DATA_TAG: u64 = 1;
const TOPOLOGY_TAG: u64 = 2;
const GAIN_TAG: u64 = 3;
const RUN_TAG: u64 = 4;

pub const LEARNING_HEADER: [&str; 6] = [
    "iter",
    "objective",
    "objective_error",
    "bits_cum",
    "joules_cum",
    "censored_cum",
];

/// Everything a learning run needs, derived from the `[learning]` block and the seed.
#[derive(Debug, Clone)]
pub struct LearningSetup {
    pub problems: Vec<LocalProblem>,
    pub topology: Topology,
    pub energy: CommEnergyModel,
    pub config: RunConfig,
}

impl LearningSetup {
    pub fn new(spec: &LearningSpec, seed: Seed) -> Result<Self, LearningError> {
        let data = SyntheticRegression {
            workers: spec.workers,
            dim: spec.dim,
            samples_per_worker: spec.samples_per_worker,
            noise: spec.noise,
            heterogeneity: spec.heterogeneity,
            regularization: spec.regularization,
        };
        let problems = data.generate(seed.derive(DATA_TAG))?;
        let kind = match spec.topology() {
            TopologyChoice::Chain => TopologyKind::Chain,
            TopologyChoice::Bipartite => TopologyKind::Bipartite {
                mean_degree: spec.mean_degree,
            },
        };
        let mut topology = build_topology(spec.workers, kind, seed.derive(TOPOLOGY_TAG))?;
        if spec.variant == Variant::DGadmm {
            topology = topology.with_coherence(Some(spec.coherence));
        }
        let gains = CommEnergyModel::with_random_gains(spec.workers, seed.derive(GAIN_TAG))
            .gains()
            .to_vec();
        let energy = CommEnergyModel::new(spec.bandwidth_hz, spec.slot_s, spec.noise_psd, gains)?;
        let mut config = RunConfig::new(
            spec.variant,
            spec.rho,
            spec.iterations,
            seed.derive(RUN_TAG),
        );
        if spec.variant == Variant::CqGgadmm {
            config = config.with_quantizer(QuantizerConfig::new(spec.bits)?);
        }
        if spec.variant.censors() {
            config = config.with_censor(CensorSchedule::new(spec.xi0, spec.alpha)?);
        }
        if let Some(target) = spec.stop_below {
            config = config.stop_below(target);
        }
        Ok(Self {
            problems,
            topology,
            energy,
            config,
        })
    }

    pub fn run(&self) -> Result<TrainingTrace, LearningError> {
        run(&self.problems, &self.topology, &self.config, &self.energy)
    }
}

pub fn trace_table(trace: &TrainingTrace) -> Table {
    let mut t = Table::new(&LEARNING_HEADER);
    for r in &trace.records {
        t.push(vec![
            r.iteration.to_string(),
            num(r.objective),
            num(r.objective_error),
            num(r.bits.value()),
            num(r.joules.value()),
            r.censored.to_string(),
        ]);
    }
    t
}
