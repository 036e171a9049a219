use serde::{Deserialize, Serialize};

use super::PlacementError;

/// One application component (Table I: `R_t`, `O_t`, `S_t`).
#[derive(Debug, Clone, PartialEq)]
pub struct AppComponent {
    /// Resources needed to host the component.
    pub resources: u32,
    /// Output produced per input, sent along every outgoing edge.
    pub output: f64,
    /// Computation size, as a multiple of the reference node's unit.
    pub compute: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AppShape {
    /// `start -> every middle component -> end`.
    Wide,
    /// Serial path.
    Long,
    Custom,
}

/// Directed acyclic component graph. Components are indexed `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AppGraph {
    components: Vec<AppComponent>,
    edges: Vec<(usize, usize)>,
    shape: AppShape,
}

impl AppGraph {
    pub fn new(
        components: Vec<AppComponent>,
        edges: Vec<(usize, usize)>,
        shape: AppShape,
    ) -> Result<Self, PlacementError> {
        let n = components.len();
        if n == 0 {
            return Err(PlacementError::InvalidInstance(
                "application has no components".into(),
            ));
        }
        for (t, c) in components.iter().enumerate() {
            if c.resources == 0
                || !(c.output >= 0.0 && c.output.is_finite())
                || !(c.compute > 0.0 && c.compute.is_finite())
            {
                return Err(PlacementError::InvalidInstance(format!(
                    "component {t}: need R_t > 0, O_t >= 0, S_t > 0"
                )));
            }
        }
        for &(a, b) in &edges {
            if a >= n || b >= n || a == b {
                return Err(PlacementError::InvalidInstance(format!(
                    "bad application edge ({a}, {b})"
                )));
            }
        }
        let g = Self {
            components,
            edges,
            shape,
        };
        if !g.is_acyclic() {
            return Err(PlacementError::InvalidInstance(
                "application graph has a cycle".into(),
            ));
        }
        Ok(g)
    }

    pub fn components(&self) -> &[AppComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn shape(&self) -> AppShape {
        self.shape
    }

    pub fn total_resources(&self) -> u64 {
        self.components.iter().map(|c| c.resources as u64).sum()
    }

    fn is_acyclic(&self) -> bool {
        let n = self.components.len();
        let mut indegree = vec![0usize; n];
        for &(_, b) in &self.edges {
            indegree[b] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for &(a, b) in &self.edges {
                if a == v {
                    indegree[b] -= 1;
                    if indegree[b] == 0 {
                        ready.push(b);
                    }
                }
            }
        }
        seen == n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Wired,
    Wireless,
}

/// One device (Table I: `P_n`, `R_n`, `C_n`).
#[derive(Debug, Clone, PartialEq)]
pub struct NetNode {
    pub speedup: f64,
    pub resources: u32,
    pub energy_per_unit: f64,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetLink {
    pub a: usize,
    pub b: usize,
    /// `T_l`: energy to move one unit of data across the link.
    pub energy: f64,
}

/// Undirected device graph with its all-pairs shortest-path energy matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NetGraph {
    nodes: Vec<NetNode>,
    links: Vec<NetLink>,
    distance: Vec<Vec<f64>>,
}

impl NetGraph {
    /// Fails if a parameter is out of range or the graph is disconnected.
    pub fn new(nodes: Vec<NetNode>, links: Vec<NetLink>) -> Result<Self, PlacementError> {
        let m = nodes.len();
        if m == 0 {
            return Err(PlacementError::InvalidInstance(
                "network has no nodes".into(),
            ));
        }
        for (n, node) in nodes.iter().enumerate() {
            let ok = node.speedup > 0.0
                && node.speedup.is_finite()
                && node.resources > 0
                && node.energy_per_unit > 0.0
                && node.energy_per_unit.is_finite();
            if !ok {
                return Err(PlacementError::InvalidInstance(format!(
                    "node {n}: need P_n > 0, R_n > 0, C_n > 0"
                )));
            }
        }
        for l in &links {
            if l.a >= m || l.b >= m || l.a == l.b || !(l.energy >= 0.0 && l.energy.is_finite()) {
                return Err(PlacementError::InvalidInstance(format!(
                    "bad link ({}, {})",
                    l.a, l.b
                )));
            }
        }
        let distance = shortest_paths(m, &links);
        if distance.iter().flatten().any(|d| d.is_infinite()) {
            return Err(PlacementError::Disconnected);
        }
        Ok(Self {
            nodes,
            links,
            distance,
        })
    }

    pub fn nodes(&self) -> &[NetNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn links(&self) -> &[NetLink] {
        &self.links
    }

    /// `D(n1, n2)`.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.distance[a][b]
    }

    pub fn total_resources(&self) -> u64 {
        self.nodes.iter().map(|n| n.resources as u64).sum()
    }

    /// `T̂_n`: mean energy of the links incident on `n` (0 for an isolated node).
    pub fn mean_link_energy(&self, n: usize) -> f64 {
        let (sum, count) = self
            .links
            .iter()
            .filter(|l| l.a == n || l.b == n)
            .fold((0.0, 0usize), |(s, c), l| (s + l.energy, c + 1));
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// Floyd-Warshall; unreachable pairs stay `+inf`.
fn shortest_paths(m: usize, links: &[NetLink]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; m]; m];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for l in links {
        let w = l.energy.min(d[l.a][l.b]);
        d[l.a][l.b] = w;
        d[l.b][l.a] = w;
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// A component-to-node map with its energy breakdown (abstract energy units).
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `placement[t]` is the node hosting component `t`.
    pub placement: Vec<usize>,
    /// `E_d`.
    pub device_energy: f64,
    /// `E_n`.
    pub network_energy: f64,
    /// `E_t = E_d + E_n`.
    pub total_energy: f64,
}
