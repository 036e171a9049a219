//! Per-worker state and the closed-form ADMM block updates.

use nalgebra::{DMatrix, DVector};

use super::problem::LocalProblem;
use super::topology::{Role, Topology};
use super::LearningError;

/// One constraint edge as seen from a worker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub edge: usize,
    pub neighbor: usize,
    /// `+1` if this worker is the left endpoint of the edge, `-1` otherwise.
    pub sign: f64,
}

#[derive(Debug, Clone)]
pub struct WorkerState {
    pub id: usize,
    pub role: Role,
    pub model: DVector<f64>,
    /// The model neighbours currently hold for this worker.
    pub last_sent: DVector<f64>,
    pub links: Vec<Link>,
    /// One dual per entry of `links`, same order.
    pub duals: Vec<DVector<f64>>,
}

impl WorkerState {
    pub fn new(id: usize, role: Role, dim: usize) -> Self {
        Self {
            id,
            role,
            model: DVector::zeros(dim),
            last_sent: DVector::zeros(dim),
            links: Vec::new(),
            duals: Vec::new(),
        }
    }

    pub fn neighbors(&self) -> impl Iterator<Item = usize> + '_ {
        self.links.iter().map(|l| l.neighbor)
    }
}

/// Creates one state per worker with links and zero duals for `topology`.
pub fn init_workers(topology: &Topology, dim: usize) -> Vec<WorkerState> {
    let mut workers: Vec<WorkerState> = (0..topology.workers())
        .map(|w| WorkerState::new(w, topology.role(w), dim))
        .collect();
    attach_links(&mut workers, topology);
    workers
}

/// Replaces roles and links from `topology`, zeroing all duals.
pub fn attach_links(workers: &mut [WorkerState], topology: &Topology) {
    let dim = workers.first().map_or(0, |w| w.model.len());
    for w in workers.iter_mut() {
        w.role = topology.role(w.id);
        w.links.clear();
        w.duals.clear();
    }
    for (idx, e) in topology.edges().iter().enumerate() {
        workers[e.left].links.push(Link {
            edge: idx,
            neighbor: e.right,
            sign: 1.0,
        });
        workers[e.left].duals.push(DVector::zeros(dim));
        workers[e.right].links.push(Link {
            edge: idx,
            neighbor: e.left,
            sign: -1.0,
        });
        workers[e.right].duals.push(DVector::zeros(dim));
    }
}

/// `argmin_θ f(θ) + Σ_j sign_j·λ_jᵀθ + (ρ/2)·Σ_j ‖θ - θ_j‖²`, solved from
/// `(H + ρ·deg·I)·θ = 2Aᵀb - Σ_j sign_j·λ_j + ρ·Σ_j θ_j`.
///
/// `neighbor_models[j]` must correspond to `worker.links[j]`.
pub fn primal_update(
    worker: &WorkerState,
    problem: &LocalProblem,
    neighbor_models: &[&DVector<f64>],
    rho: f64,
) -> Result<DVector<f64>, LearningError> {
    assert_eq!(
        neighbor_models.len(),
        worker.links.len(),
        "one model per link"
    );
    let d = problem.dim();
    let deg = worker.links.len() as f64;
    let system = problem.hessian() + DMatrix::identity(d, d) * (rho * deg);
    let mut rhs = problem.linear().clone();
    for ((link, dual), theta) in worker.links.iter().zip(&worker.duals).zip(neighbor_models) {
        rhs -= dual * link.sign;
        rhs += *theta * rho;
    }
    let chol = system.cholesky().ok_or(LearningError::SingularSystem)?;
    Ok(chol.solve(&rhs))
}

/// `λ' = λ + ρ·(θ_left - θ_right)`.
pub fn dual_update(
    lambda: &DVector<f64>,
    theta_left: &DVector<f64>,
    theta_right: &DVector<f64>,
    rho: f64,
) -> DVector<f64> {
    lambda + (theta_left - theta_right) * rho
}

/// Censoring thresholds `ξ_k = ξ0·α^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensorSchedule {
    xi0: f64,
    alpha: f64,
}

impl CensorSchedule {
    pub fn new(xi0: f64, alpha: f64) -> Result<Self, LearningError> {
        if !(xi0.is_finite() && xi0 >= 0.0) {
            return Err(LearningError::InvalidParameter("censor xi0 must be >= 0"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(LearningError::InvalidParameter(
                "censor alpha must be in (0, 1]",
            ));
        }
        Ok(Self { xi0, alpha })
    }

    pub fn xi0(self) -> f64 {
        self.xi0
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn threshold(self, k: usize) -> f64 {
        self.xi0 * self.alpha.powi(k.min(i32::MAX as usize) as i32)
    }
}

/// `true` (transmit) iff `‖current - last_sent‖₂ > threshold`.
pub fn censor_decision(current: &DVector<f64>, last_sent: &DVector<f64>, threshold: f64) -> bool {
    let diff = current - last_sent;
    // rescaled so that tiny non-zero changes do not underflow to a zero norm
    let scale = diff.amax();
    scale > 0.0 && scale * (diff / scale).norm() > threshold
}
