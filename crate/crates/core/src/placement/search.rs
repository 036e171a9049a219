//! Depth-first branch-and-bound shared by the exact and heuristic solvers.
//!
//! Components are fixed in decreasing `R_t` order (index breaks ties) and
//! nodes are tried in increasing id, so the first optimal leaf found is the
//! returned one. Subtrees of the first component run as separate tasks that
//! share the incumbent value; the lowest-indexed subtree wins ties, which
//! reproduces the sequential answer.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use crate::exec;

use super::evaluate::device_cost;
use super::model::{AppGraph, NetGraph};

/// What the search minimizes: `Σ_t unary[t][X(t)]` plus, when `pairwise`,
/// `Σ_(t1,t2) O_t1·D(X(t1), X(t2))`.
pub(crate) struct Objective<'a> {
    pub app: &'a AppGraph,
    pub net: &'a NetGraph,
    pub unary: Vec<Vec<f64>>,
    pub pairwise: bool,
}

impl<'a> Objective<'a> {
    pub fn device_only(app: &'a AppGraph, net: &'a NetGraph, pairwise: bool) -> Self {
        let unary = (0..app.len())
            .map(|t| {
                (0..net.len())
                    .map(|n| device_cost(app, net, t, n))
                    .collect()
            })
            .collect();
        Self {
            app,
            net,
            unary,
            pairwise,
        }
    }
}

pub(crate) enum Outcome {
    /// `None` when no feasible leaf exists below the initial upper bound.
    Finished(Option<(f64, Vec<usize>)>),
    Stopped {
        best: Option<(f64, Vec<usize>)>,
        root_bound: f64,
    },
}

struct Shared {
    upper: AtomicU64,
    stop: AtomicBool,
    deadline: Option<Instant>,
}

impl Shared {
    fn upper(&self) -> f64 {
        f64::from_bits(self.upper.load(Ordering::Relaxed))
    }

    // non-negative f64 bit patterns order like the values
    fn offer(&self, value: f64) {
        self.upper
            .fetch_min(value.max(0.0).to_bits(), Ordering::Relaxed);
    }
}

struct Plan {
    order: Vec<usize>,
    /// For position `i`: `(earlier position, source output)` per application
    /// edge between `order[i]` and an earlier component. Source output is
    /// `O` of whichever endpoint is the edge's tail.
    back_edges: Vec<Vec<(usize, f64)>>,
    /// `suffix_min[i] = Σ_{j ≥ i} min_n unary[order[j]][n]`.
    suffix_min: Vec<f64>,
    suffix_demand: Vec<u64>,
}

fn plan(obj: &Objective) -> Plan {
    let app = obj.app;
    let mut order: Vec<usize> = (0..app.len()).collect();
    order.sort_by_key(|&t| (std::cmp::Reverse(app.components()[t].resources), t));
    let mut position = vec![0; app.len()];
    for (i, &t) in order.iter().enumerate() {
        position[t] = i;
    }
    let mut back_edges = vec![Vec::new(); app.len()];
    if obj.pairwise {
        for &(a, b) in app.edges() {
            let w = app.components()[a].output;
            let (pa, pb) = (position[a], position[b]);
            if pa < pb {
                back_edges[pb].push((pa, w));
            } else {
                back_edges[pa].push((pb, w));
            }
        }
    }
    let mut suffix_min = vec![0.0; app.len() + 1];
    let mut suffix_demand = vec![0; app.len() + 1];
    for i in (0..app.len()).rev() {
        let t = order[i];
        let m = obj.unary[t].iter().copied().fold(f64::INFINITY, f64::min);
        suffix_min[i] = suffix_min[i + 1] + m;
        suffix_demand[i] = suffix_demand[i + 1] + app.components()[t].resources as u64;
    }
    Plan {
        order,
        back_edges,
        suffix_min,
        suffix_demand,
    }
}

struct Worker<'a> {
    obj: &'a Objective<'a>,
    plan: &'a Plan,
    shared: &'a Shared,
    nodes_at: Vec<usize>,
    free: Vec<u64>,
    free_total: u64,
    best: Option<(f64, Vec<usize>)>,
    visited: u64,
}

impl Worker<'_> {
    fn limit(&self) -> f64 {
        let local = self.best.as_ref().map_or(f64::INFINITY, |b| b.0);
        local.min(self.shared.upper())
    }

    fn step_cost(&self, i: usize, n: usize) -> f64 {
        let t = self.plan.order[i];
        let mut c = self.obj.unary[t][n];
        for &(j, w) in &self.plan.back_edges[i] {
            c += w * self.obj.net.distance(self.nodes_at[j], n);
        }
        c
    }

    fn place(&mut self, i: usize, n: usize, cost: f64) {
        let demand = self.obj.app.components()[self.plan.order[i]].resources as u64;
        if demand > self.free[n] {
            return;
        }
        let value = cost + self.step_cost(i, n);
        if value + self.plan.suffix_min[i + 1] > self.limit() {
            return;
        }
        self.nodes_at[i] = n;
        self.free[n] -= demand;
        self.free_total -= demand;
        self.descend(i + 1, value);
        self.free[n] += demand;
        self.free_total += demand;
    }

    fn descend(&mut self, i: usize, cost: f64) {
        if self.shared.stop.load(Ordering::Relaxed) {
            return;
        }
        self.visited += 1;
        if self.visited.is_multiple_of(4096) {
            if let Some(deadline) = self.shared.deadline {
                if Instant::now() >= deadline {
                    self.shared.stop.store(true, Ordering::Relaxed);
                    return;
                }
            }
        }
        let len = self.plan.order.len();
        if i == len {
            if self.best.as_ref().is_none_or(|b| cost < b.0) && cost <= self.shared.upper() {
                let mut placement = vec![0; len];
                for (pos, &t) in self.plan.order.iter().enumerate() {
                    placement[t] = self.nodes_at[pos];
                }
                self.best = Some((cost, placement));
                self.shared.offer(cost);
            }
            return;
        }
        if self.plan.suffix_demand[i] > self.free_total {
            return;
        }
        for n in 0..self.obj.net.len() {
            self.place(i, n, cost);
        }
    }
}

/// Minimizes `obj` subject to the per-node resource limits. Leaves worse
/// than `upper` are ignored; pass `INFINITY` for none.
pub(crate) fn branch_and_bound(obj: &Objective, upper: f64, budget: Option<Duration>) -> Outcome {
    let plan = plan(obj);
    let shared = Shared {
        upper: AtomicU64::new(upper.to_bits()),
        stop: AtomicBool::new(false),
        deadline: budget.map(|b| Instant::now() + b),
    };
    let capacity: Vec<u64> = obj.net.nodes().iter().map(|n| n.resources as u64).collect();
    let total: u64 = capacity.iter().sum();
    let new_worker = || Worker {
        obj,
        plan: &plan,
        shared: &shared,
        nodes_at: vec![0; plan.order.len()],
        free: capacity.clone(),
        free_total: total,
        best: None,
        visited: 0,
    };
    let results = if plan.order.is_empty() {
        let mut w = new_worker();
        w.descend(0, 0.0);
        vec![w.best]
    } else {
        exec::map_indexed(obj.net.len(), |n| {
            let mut w = new_worker();
            if plan.suffix_demand[0] <= total {
                w.place(0, n, 0.0);
            }
            w.best
        })
    };
    // strict comparison keeps the lowest-indexed subtree on ties
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| r.0 < b.0) {
            best = Some(r);
        }
    }
    if shared.stop.load(Ordering::Relaxed) {
        Outcome::Stopped {
            best,
            root_bound: plan.suffix_min[0],
        }
    } else {
        Outcome::Finished(best)
    }
}
