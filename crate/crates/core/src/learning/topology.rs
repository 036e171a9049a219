//! Worker communication graphs and the head/tail partition.
//!
//! Worker indices are 0-based: "worker 1" of a chain is index 0.

use std::collections::BTreeSet;

use super::LearningError;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Head,
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologyKind {
    Chain,
    Bipartite { mean_degree: f64 },
}

/// One constraint `θ_left = θ_right`. The dual enters the left worker's
/// update with `+λ` and the right worker's with `-λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    kind: TopologyKind,
    roles: Vec<Role>,
    edges: Vec<Edge>,
    /// Chain order, for chain topologies.
    order: Option<Vec<usize>>,
    /// Iterations between re-chaining; `None` is a static topology.
    coherence: Option<usize>,
}

const RECHAIN_TAG: u64 = 0xC4A1_0000;
const BIPARTITE_TAG: u64 = 0xB1BA_0000;

impl Topology {
    /// Chain visiting workers in `order`; roles alternate head, tail, head, ...
    pub fn chain_from_order(order: Vec<usize>) -> Result<Self, LearningError> {
        let n = order.len();
        if n < 2 {
            return Err(LearningError::InvalidWorkerCount(n));
        }
        let mut seen = vec![false; n];
        for &w in &order {
            if w >= n || std::mem::replace(&mut seen[w], true) {
                return Err(LearningError::InvalidParameter(
                    "chain order must be a permutation",
                ));
            }
        }
        let mut roles = vec![Role::Head; n];
        for (pos, &w) in order.iter().enumerate() {
            roles[w] = if pos % 2 == 0 { Role::Head } else { Role::Tail };
        }
        let edges = order
            .windows(2)
            .map(|p| Edge {
                left: p[0],
                right: p[1],
            })
            .collect();
        Ok(Self {
            kind: TopologyKind::Chain,
            roles,
            edges,
            order: Some(order),
            coherence: None,
        })
    }

    /// General bipartite graph. Edges are re-oriented head → tail and sorted.
    pub fn bipartite(
        roles: Vec<Role>,
        pairs: &[(usize, usize)],
        mean_degree: f64,
    ) -> Result<Self, LearningError> {
        let n = roles.len();
        if n < 2 {
            return Err(LearningError::InvalidWorkerCount(n));
        }
        let mut edges = BTreeSet::new();
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(LearningError::InvalidParameter(
                    "edge endpoint out of range",
                ));
            }
            let edge = match (roles[a], roles[b]) {
                (Role::Head, Role::Tail) => Edge { left: a, right: b },
                (Role::Tail, Role::Head) => Edge { left: b, right: a },
                _ => return Err(LearningError::NotBipartite { a, b }),
            };
            edges.insert(edge);
        }
        let topo = Self {
            kind: TopologyKind::Bipartite { mean_degree },
            roles,
            edges: edges.into_iter().collect(),
            order: None,
            coherence: None,
        };
        if !topo.is_connected() {
            return Err(LearningError::Disconnected);
        }
        Ok(topo)
    }

    pub fn with_coherence(mut self, period: Option<usize>) -> Self {
        self.coherence = period.filter(|&p| p > 0);
        self
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn is_chain(&self) -> bool {
        matches!(self.kind, TopologyKind::Chain)
    }

    pub fn workers(&self) -> usize {
        self.roles.len()
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn role(&self, worker: usize) -> Role {
        self.roles[worker]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn chain_order(&self) -> Option<&[usize]> {
        self.order.as_deref()
    }

    pub fn coherence(&self) -> Option<usize> {
        self.coherence
    }

    pub fn members(&self, role: Role) -> Vec<usize> {
        (0..self.workers())
            .filter(|&w| self.roles[w] == role)
            .collect()
    }

    pub fn neighbors(&self, worker: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.left == worker {
                    Some(e.right)
                } else if e.right == worker {
                    Some(e.left)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.workers();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.left].push(e.right);
            adj[e.right].push(e.left);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Builds the initial topology for `n` workers.
///
/// A chain is `0 - 1 - ... - n-1` with heads at even positions. A bipartite
/// graph splits a random permutation into `ceil(n/2)` heads and the rest tails,
/// links them with a random spanning tree and then adds random head-tail
/// edges until the mean degree reaches the configured value.
pub fn build_topology(n: usize, kind: TopologyKind, seed: Seed) -> Result<Topology, LearningError> {
    if n < 2 {
        return Err(LearningError::InvalidWorkerCount(n));
    }
    match kind {
        TopologyKind::Chain => Topology::chain_from_order((0..n).collect()),
        TopologyKind::Bipartite { mean_degree } => {
            if !(mean_degree.is_finite() && mean_degree > 0.0) {
                return Err(LearningError::InvalidParameter(
                    "mean degree must be positive",
                ));
            }
            random_bipartite(n, mean_degree, seed)
        }
    }
}

fn random_bipartite(n: usize, mean_degree: f64, seed: Seed) -> Result<Topology, LearningError> {
    let mut rng = seed.derive(BIPARTITE_TAG).rng();
    let mut perm: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut perm);
    let heads = n.div_ceil(2);
    let mut roles = vec![Role::Tail; n];
    for &w in &perm[..heads] {
        roles[w] = Role::Head;
    }

    // Spanning tree: start from one head and one tail, then attach every other
    // worker to a random already-attached worker of the opposite role.
    let first_tail = perm[heads];
    let mut order = vec![perm[0], first_tail];
    order.extend(perm[1..heads].iter().chain(&perm[heads + 1..]).copied());
    rng.shuffle(&mut order[2..]);
    let mut pairs = BTreeSet::new();
    pairs.insert(ordered(perm[0], first_tail));
    let mut attached_heads = vec![perm[0]];
    let mut attached_tails = vec![first_tail];
    for &w in &order[2..] {
        let (pool, own) = match roles[w] {
            Role::Head => (&attached_tails, &mut attached_heads),
            Role::Tail => (&attached_heads, &mut attached_tails),
        };
        let other = pool[rng.below(pool.len() as u64) as usize];
        pairs.insert(ordered(w, other));
        own.push(w);
    }

    let max_edges = heads * (n - heads);
    let target = ((mean_degree * n as f64 / 2.0).round() as usize).clamp(n - 1, max_edges);
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .filter(|&a| roles[a] == Role::Head)
        .flat_map(|a| {
            (0..n)
                .filter(|&b| roles[b] == Role::Tail)
                .map(move |b| ordered(a, b))
        })
        .filter(|p| !pairs.contains(p))
        .collect();
    candidates.sort_unstable();
    rng.shuffle(&mut candidates);
    let extra = target - pairs.len();
    pairs.extend(candidates.into_iter().take(extra));

    let pairs: Vec<_> = pairs.into_iter().collect();
    Topology::bipartite(roles, &pairs, mean_degree)
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Re-draws the chain at a coherence boundary.
///
/// Worker 0 stays a head and worker `n-1` stays a tail. The remaining
/// `ceil(n/2) - 1` heads are drawn from the shared pseudo-random stream for
/// `(seed, k)`. Workers get fresh positions in the unit square, and the chain
/// is built greedily from worker 0: each worker links to the nearest worker of
/// the opposite role that is not yet on the chain (ties to the lower index).
///
/// Returns the topology unchanged when it is static, not a chain, or `k` is
/// not a positive multiple of the coherence period.
pub fn rechain(topology: &Topology, k: usize, seed: Seed) -> Topology {
    let Some(period) = topology.coherence else {
        return topology.clone();
    };
    if !topology.is_chain() || k == 0 || !k.is_multiple_of(period) {
        return topology.clone();
    }
    let n = topology.workers();
    let mut rng = seed.derive(RECHAIN_TAG).derive(k as u64).rng();

    let mut roles = vec![Role::Tail; n];
    roles[0] = Role::Head;
    let mut middle: Vec<usize> = (1..n - 1).collect();
    rng.shuffle(&mut middle);
    for &w in middle.iter().take(n.div_ceil(2) - 1) {
        roles[w] = Role::Head;
    }

    let positions: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.next_uniform(), rng.next_uniform()))
        .collect();
    let dist2 = |a: usize, b: usize| {
        let (dx, dy) = (
            positions[a].0 - positions[b].0,
            positions[a].1 - positions[b].1,
        );
        dx * dx + dy * dy
    };

    let mut on_chain = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = 0;
    on_chain[0] = true;
    order.push(0);
    while order.len() < n {
        let want = match roles[current] {
            Role::Head => Role::Tail,
            Role::Tail => Role::Head,
        };
        let next = (0..n)
            .filter(|&w| !on_chain[w] && roles[w] == want)
            .min_by(|&a, &b| {
                dist2(current, a)
                    .total_cmp(&dist2(current, b))
                    .then(a.cmp(&b))
            })
            .expect("head and tail counts differ by at most one");
        on_chain[next] = true;
        order.push(next);
        current = next;
    }

    Topology::chain_from_order(order)
        .expect("greedy chain is a permutation")
        .with_coherence(topology.coherence)
}
