//! Training loops for the ADMM family and the per-iteration trace.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use super::admm::{
    attach_links, dual_update, init_workers, primal_update, CensorSchedule, WorkerState,
};
use super::energy::{message_energy, CommEnergyModel};
use super::problem::{centralized_solution, check_dims, total_objective, LocalProblem};
use super::quantize::{quantize, QuantizerConfig, FULL_PRECISION_BITS};
use super::topology::{rechain, Role, Topology};
use super::LearningError;
use crate::exec;
use crate::rng::{Seed, SimRng};
use crate::units::{Bits, Joules, RealVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Parameter-server consensus ADMM: every worker uploads every iteration.
    PsAdmm,
    /// Group ADMM over a static chain.
    Gadmm,
    /// Group ADMM over a chain that is re-drawn every coherence period.
    DGadmm,
    /// Group ADMM over a bipartite graph.
    Ggadmm,
    /// Censored bipartite group ADMM.
    CGgadmm,
    /// Censored bipartite group ADMM on stochastically quantized deltas.
    CqGgadmm,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::PsAdmm,
        Variant::Gadmm,
        Variant::DGadmm,
        Variant::Ggadmm,
        Variant::CGgadmm,
        Variant::CqGgadmm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PsAdmm => "ps-admm",
            Variant::Gadmm => "gadmm",
            Variant::DGadmm => "d-gadmm",
            Variant::Ggadmm => "ggadmm",
            Variant::CGgadmm => "c-ggadmm",
            Variant::CqGgadmm => "cq-ggadmm",
        }
    }

    pub fn censors(self) -> bool {
        matches!(self, Variant::CGgadmm | Variant::CqGgadmm)
    }

    pub fn needs_chain(self) -> bool {
        matches!(self, Variant::Gadmm | Variant::DGadmm)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = LearningError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| LearningError::UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub variant: Variant,
    pub rho: f64,
    pub iterations: usize,
    pub quantizer: Option<QuantizerConfig>,
    pub censor: Option<CensorSchedule>,
    pub seed: Seed,
    /// Stop as soon as the objective error drops to this value.
    pub stop_below: Option<f64>,
}

impl RunConfig {
    pub fn new(variant: Variant, rho: f64, iterations: usize, seed: Seed) -> Self {
        Self {
            variant,
            rho,
            iterations,
            quantizer: None,
            censor: None,
            seed,
            stop_below: None,
        }
    }

    pub fn with_quantizer(mut self, q: QuantizerConfig) -> Self {
        self.quantizer = Some(q);
        self
    }

    pub fn with_censor(mut self, c: CensorSchedule) -> Self {
        self.censor = Some(c);
        self
    }

    pub fn stop_below(mut self, target: f64) -> Self {
        self.stop_below = Some(target);
        self
    }

    fn validate(&self, topology: &Topology) -> Result<(), LearningError> {
        let mismatch = |msg: &str| {
            Err(LearningError::ConfigMismatch(format!(
                "{}: {msg}",
                self.variant
            )))
        };
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(LearningError::InvalidParameter("rho must be positive"));
        }
        if self.iterations == 0 {
            return Err(LearningError::InvalidParameter(
                "iterations must be at least 1",
            ));
        }
        match self.variant {
            Variant::CqGgadmm if self.quantizer.is_none() => {
                return mismatch("requires a quantizer")
            }
            v if v != Variant::CqGgadmm && self.quantizer.is_some() => {
                return mismatch("quantizer is only valid for cq-ggadmm")
            }
            _ => {}
        }
        if self.variant.censors() && self.censor.is_none() {
            return mismatch("requires a censor schedule");
        }
        if !self.variant.censors() && self.censor.is_some() {
            return mismatch("censor schedule is only valid for c-ggadmm and cq-ggadmm");
        }
        if self.variant.needs_chain() && !topology.is_chain() {
            return mismatch("requires a chain topology");
        }
        Ok(())
    }
}

/// State after one iteration. Counters are cumulative from iteration 1.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub objective_error: f64,
    pub bits: Bits,
    pub joules: Joules,
    pub transmissions: u64,
    pub censored: u64,
    /// Sum of `‖θ_n - θ_m‖` over constraint edges (for the parameter server,
    /// over worker-to-server links).
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingTrace {
    pub variant: Variant,
    pub optimum: RealVector,
    pub optimum_objective: f64,
    pub records: Vec<IterationRecord>,
    pub final_models: Vec<RealVector>,
}

impl TrainingTrace {
    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("at least one iteration")
    }

    fn first_reaching(&self, target: f64) -> Option<&IterationRecord> {
        self.records.iter().find(|r| r.objective_error <= target)
    }

    /// First iteration whose objective error is at most `target`.
    pub fn iterations_to(&self, target: f64) -> Option<usize> {
        self.first_reaching(target).map(|r| r.iteration)
    }

    /// Cumulative energy when the objective error first reaches `target`.
    pub fn joules_to(&self, target: f64) -> Option<Joules> {
        self.first_reaching(target).map(|r| r.joules)
    }
}

/// Runs `config.variant` for `config.iterations` iterations from all-zero
/// models and duals.
///
/// Group variants alternate heads, tails, then duals each iteration. Heads
/// (and then tails) transmit in the same phase and split the bandwidth of
/// `energy` evenly among those that actually transmit. A censored worker
/// sends nothing and its neighbours keep using its last transmitted model,
/// which also enters the dual updates.
pub fn run(
    problems: &[LocalProblem],
    topology: &Topology,
    config: &RunConfig,
    energy: &CommEnergyModel,
) -> Result<TrainingTrace, LearningError> {
    let dim = check_dims(problems)?;
    if topology.workers() != problems.len() {
        return Err(LearningError::ConfigMismatch(format!(
            "topology has {} workers but {} problems were given",
            topology.workers(),
            problems.len()
        )));
    }
    if energy.workers() != problems.len() {
        return Err(LearningError::ConfigMismatch(format!(
            "energy model has {} channel gains but {} workers",
            energy.workers(),
            problems.len()
        )));
    }
    config.validate(topology)?;
    let optimum = centralized_solution(problems)?;
    let optimum_objective = total_objective(problems, &optimum);
    let ctx = Context {
        problems,
        energy,
        config,
        dim,
        optimum_objective,
    };
    let (records, final_models) = match config.variant {
        Variant::PsAdmm => run_parameter_server(&ctx),
        _ => GroupRun::new(&ctx, topology.clone()).run()?,
    };
    Ok(TrainingTrace {
        variant: config.variant,
        optimum,
        optimum_objective,
        records,
        final_models,
    })
}

struct Context<'a> {
    problems: &'a [LocalProblem],
    energy: &'a CommEnergyModel,
    config: &'a RunConfig,
    dim: usize,
    optimum_objective: f64,
}

impl Context<'_> {
    fn full_payload(&self) -> Bits {
        Bits::new((FULL_PRECISION_BITS as usize * self.dim) as f64).expect("non-negative")
    }

    fn should_stop(&self, error: f64) -> bool {
        self.config.stop_below.is_some_and(|t| error <= t)
    }
}

#[derive(Default)]
struct Counters {
    bits: Bits,
    joules: Joules,
    transmissions: u64,
    censored: u64,
}

fn run_parameter_server(ctx: &Context<'_>) -> (Vec<IterationRecord>, Vec<RealVector>) {
    let n = ctx.problems.len();
    let rho = ctx.config.rho;
    let mut local = vec![DVector::zeros(ctx.dim); n];
    let mut duals = vec![DVector::zeros(ctx.dim); n];
    let mut consensus = DVector::zeros(ctx.dim);
    let mut counters = Counters::default();
    let mut records = Vec::with_capacity(ctx.config.iterations);
    let payload = ctx.full_payload();
    let shared = ctx.energy.shared(n);

    for k in 1..=ctx.config.iterations {
        local = exec::map_indexed(n, |i| {
            let p = &ctx.problems[i];
            let d = ctx.dim;
            let system = p.hessian() + nalgebra::DMatrix::identity(d, d) * rho;
            let rhs = p.linear() - &duals[i] + &consensus * rho;
            system
                .cholesky()
                .expect("positive definite for rho > 0")
                .solve(&rhs)
        });
        consensus = local
            .iter()
            .zip(&duals)
            .fold(DVector::zeros(ctx.dim), |acc, (x, l)| acc + x + l / rho)
            / n as f64;
        for (l, x) in duals.iter_mut().zip(&local) {
            *l += (x - &consensus) * rho;
        }
        for i in 0..n {
            counters.bits += payload;
            counters.joules += message_energy(payload, &shared, ctx.energy.gain(i));
            counters.transmissions += 1;
        }
        let objective = total_objective(ctx.problems, &consensus);
        let error = (objective - ctx.optimum_objective).abs();
        records.push(IterationRecord {
            iteration: k,
            objective,
            objective_error: error,
            bits: counters.bits,
            joules: counters.joules,
            transmissions: counters.transmissions,
            censored: 0,
            residual: local.iter().map(|x| (x - &consensus).norm()).sum(),
        });
        if ctx.should_stop(error) {
            break;
        }
    }
    let finals = local.into_iter().map(to_real).collect();
    (records, finals)
}

fn to_real(v: DVector<f64>) -> RealVector {
    RealVector::from_dvector(v).expect("iterates stay finite")
}

const QUANTIZER_TAG: u64 = 0x0_9A47;

struct GroupRun<'a> {
    ctx: &'a Context<'a>,
    topology: Topology,
    workers: Vec<WorkerState>,
    rngs: Vec<SimRng>,
    counters: Counters,
}

struct PhaseOutput {
    model: DVector<f64>,
    /// New last-sent model and payload, if the worker transmitted.
    sent: Option<(DVector<f64>, Bits)>,
    rng: SimRng,
}

impl<'a> GroupRun<'a> {
    fn new(ctx: &'a Context<'a>, topology: Topology) -> Self {
        let workers = init_workers(&topology, ctx.dim);
        let qseed = ctx.config.seed.derive(QUANTIZER_TAG);
        let rngs = (0..workers.len())
            .map(|w| qseed.derive(w as u64).rng())
            .collect();
        Self {
            ctx,
            topology,
            workers,
            rngs,
            counters: Counters::default(),
        }
    }

    fn run(mut self) -> Result<(Vec<IterationRecord>, Vec<RealVector>), LearningError> {
        let cfg = self.ctx.config;
        let mut records = Vec::with_capacity(cfg.iterations);
        for k in 1..=cfg.iterations {
            if cfg.variant == Variant::DGadmm {
                self.maybe_rechain(k - 1);
            }
            self.phase(Role::Head, k)?;
            self.phase(Role::Tail, k)?;
            self.update_duals();
            let record = self.record(k);
            let stop = self.ctx.should_stop(record.objective_error);
            records.push(record);
            if stop {
                break;
            }
        }
        let finals = self.workers.into_iter().map(|w| to_real(w.model)).collect();
        Ok((records, finals))
    }

    /// At a coherence boundary, re-draws the chain and rebuilds the duals
    /// along the new order so that every worker's stationarity condition
    /// holds at the current models: `μ_i = μ_{i-1} - ∇f_{w_i}(θ_{w_i})`.
    /// Each worker except the last hands its right dual to its right
    /// neighbour, one full-precision message at a time.
    fn maybe_rechain(&mut self, k: usize) {
        let Some(period) = self.topology.coherence() else {
            return;
        };
        if k == 0 || !k.is_multiple_of(period) {
            return;
        }
        self.topology = rechain(&self.topology, k, self.ctx.config.seed);
        attach_links(&mut self.workers, &self.topology);
        let order = self
            .topology
            .chain_order()
            .expect("d-gadmm runs on a chain")
            .to_vec();
        let payload = self.ctx.full_payload();
        let mut mu = DVector::zeros(self.ctx.dim);
        for (edge, pair) in order.windows(2).enumerate() {
            let (left, right) = (pair[0], pair[1]);
            mu -= self.ctx.problems[left].gradient(&self.workers[left].model);
            self.set_dual(edge, left, right, mu.clone());
            self.counters.bits += payload;
            self.counters.joules +=
                message_energy(payload, self.ctx.energy, self.ctx.energy.gain(left));
        }
    }

    fn set_dual(&mut self, edge: usize, left: usize, right: usize, value: DVector<f64>) {
        for w in [left, right] {
            let slot = self.workers[w]
                .links
                .iter()
                .position(|l| l.edge == edge)
                .expect("edge is incident");
            self.workers[w].duals[slot] = value.clone();
        }
    }

    fn phase(&mut self, role: Role, k: usize) -> Result<(), LearningError> {
        let members: Vec<usize> = (0..self.workers.len())
            .filter(|&w| self.workers[w].role == role)
            .collect();
        let outputs = exec::map_slice(&members, |&w| self.update_worker(w, k));
        let outputs = outputs.into_iter().collect::<Result<Vec<_>, _>>()?;

        let senders = outputs.iter().filter(|o| o.sent.is_some()).count();
        let shared = self.ctx.energy.shared(senders);
        for (&w, out) in members.iter().zip(outputs) {
            let worker = &mut self.workers[w];
            worker.model = out.model;
            self.rngs[w] = out.rng;
            match out.sent {
                Some((hat, payload)) => {
                    worker.last_sent = hat;
                    self.counters.bits += payload;
                    self.counters.joules +=
                        message_energy(payload, &shared, self.ctx.energy.gain(w));
                    self.counters.transmissions += 1;
                }
                None => self.counters.censored += 1,
            }
        }
        Ok(())
    }

    fn update_worker(&self, w: usize, k: usize) -> Result<PhaseOutput, LearningError> {
        let worker = &self.workers[w];
        let neighbor_models: Vec<&DVector<f64>> = worker
            .links
            .iter()
            .map(|l| &self.workers[l.neighbor].last_sent)
            .collect();
        let model = primal_update(
            worker,
            &self.ctx.problems[w],
            &neighbor_models,
            self.ctx.config.rho,
        )?;
        let mut rng = self.rngs[w].clone();
        let cfg = self.ctx.config;
        let threshold = cfg.censor.map(|c| c.threshold(k));
        let sent = match (cfg.variant, cfg.quantizer, threshold) {
            (Variant::CqGgadmm, Some(q), Some(xi)) => {
                let msg = quantize(&(&model - &worker.last_sent), q, &mut rng);
                let candidate = &worker.last_sent + msg.dequantize();
                super::admm::censor_decision(&candidate, &worker.last_sent, xi)
                    .then(|| (candidate, msg.payload()))
            }
            (_, _, Some(xi)) => super::admm::censor_decision(&model, &worker.last_sent, xi)
                .then(|| (model.clone(), self.ctx.full_payload())),
            _ => Some((model.clone(), self.ctx.full_payload())),
        };
        Ok(PhaseOutput { model, sent, rng })
    }

    fn update_duals(&mut self) {
        let rho = self.ctx.config.rho;
        for (idx, e) in self.topology.edges().to_vec().into_iter().enumerate() {
            let slot = self.workers[e.left]
                .links
                .iter()
                .position(|l| l.edge == idx)
                .expect("edge is incident");
            let updated = dual_update(
                &self.workers[e.left].duals[slot],
                &self.workers[e.left].last_sent,
                &self.workers[e.right].last_sent,
                rho,
            );
            self.set_dual(idx, e.left, e.right, updated);
        }
    }

    fn record(&self, k: usize) -> IterationRecord {
        let objective: f64 = self
            .ctx
            .problems
            .iter()
            .zip(&self.workers)
            .map(|(p, w)| p.value(&w.model))
            .sum();
        let residual = self
            .topology
            .edges()
            .iter()
            .map(|e| (&self.workers[e.left].model - &self.workers[e.right].model).norm())
            .sum();
        IterationRecord {
            iteration: k,
            objective,
            objective_error: (objective - self.ctx.optimum_objective).abs(),
            bits: self.counters.bits,
            joules: self.counters.joules,
            transmissions: self.counters.transmissions,
            censored: self.counters.censored,
            residual,
        }
    }
}
