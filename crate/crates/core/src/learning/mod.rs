//! Decentralized group-ADMM learning with communication energy accounting.

mod admm;
mod energy;
mod problem;
mod quantize;
mod run;
mod topology;

use thiserror::Error;

pub use admm::{
    attach_links, censor_decision, dual_update, init_workers, primal_update, CensorSchedule, Link,
    WorkerState,
};
pub use energy::{message_energy, CommEnergyModel};
pub use problem::{
    centralized_solution, total_objective, LocalProblem, LossKind, SyntheticRegression,
};
pub use quantize::{quantize, QuantizedMessage, QuantizerConfig, FULL_PRECISION_BITS, RANGE_BITS};
pub use run::{run, IterationRecord, RunConfig, TrainingTrace, Variant};
pub use topology::{build_topology, rechain, Edge, Role, Topology, TopologyKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearningError {
    #[error("at least two workers are required, got {0}")]
    InvalidWorkerCount(usize),
    #[error("problem has no samples or zero dimension")]
    EmptyProblem,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("aggregate system is singular")]
    SingularSystem,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("edge ({a}, {b}) joins two workers with the same role")]
    NotBipartite { a: usize, b: usize },
    #[error("topology is not connected")]
    Disconnected,
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
}
