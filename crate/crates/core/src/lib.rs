//! Energy and performance models for intelligent IoT edge environments.
//!
//! Three pillars share the primitives in [`units`], [`rng`] and [`fixed_point`]:
//!
//! * [`learning`]: decentralized group-ADMM learning (chain, dynamic re-chaining,
//!   bipartite graphs, censoring, stochastic quantization) with per-message
//!   communication energy accounting, plus a parameter-server ADMM baseline.
//! * [`placement`]: energy-optimal placement of application components onto a
//!   heterogeneous device network (exact branch-and-bound, the averaged-link
//!   linear heuristic, instance generators and a brute-force oracle).
//! * [`radio`]: NB-IoT random access / transmission latency and energy, and the
//!   proof-of-work ledger terms, with Monte-Carlo oracles.
//!
//! Batch workloads (Monte-Carlo trials, instance batches, seed sweeps) run on
//! rayon when the `parallel` feature is enabled (the default). Results are
//! bit-identical to the sequential build: every parallel unit of work owns a
//! random stream derived from the run seed and its index, and reductions are
//! performed in index order.

pub mod exec;
pub mod fixed_point;
pub mod learning;
pub mod placement;
pub mod radio;
pub mod rng;
pub mod units;

pub use fixed_point::{fixed_point, FixedPointError};
pub use rng::{Seed, SimRng};
pub use units::{Bits, Joules, Probability, RealVector, Seconds, UnitError, Watts};
