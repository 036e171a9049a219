//! Text instance format using the model's symbol names.
//!
//! ```toml
//! [application]
//! shape = "long"
//!
//! [[application.component]]
//! id = 1
//! R_t = 2
//! O_t = 1.0
//! S_t = 1.0
//!
//! [[application.edge]]
//! from = 1
//! to = 2
//!
//! [[network.node]]
//! id = 1
//! kind = "wired"
//! P_n = 1.5
//! R_n = 4
//! C_n = 0.9
//!
//! [[network.link]]
//! a = 1
//! b = 2
//! T_l = 0.2
//! ```
//!
//! Ids are 1-based and must be listed as `1, 2, ...`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{AppComponent, AppGraph, AppShape, NetGraph, NetLink, NetNode, NodeKind};
use super::PlacementError;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Serialize(#[from] toml::ser::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(#[from] PlacementError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub app: AppGraph,
    pub net: NetGraph,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    application: AppDoc,
    network: NetDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AppDoc {
    shape: AppShape,
    component: Vec<ComponentDoc>,
    #[serde(default)]
    edge: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct ComponentDoc {
    id: usize,
    R_t: u32,
    O_t: f64,
    S_t: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: usize,
    to: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetDoc {
    node: Vec<NodeDoc>,
    #[serde(default)]
    link: Vec<LinkDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct NodeDoc {
    id: usize,
    kind: NodeKind,
    P_n: f64,
    R_n: u32,
    C_n: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct LinkDoc {
    a: usize,
    b: usize,
    T_l: f64,
}

fn check_ids(what: &str, ids: impl Iterator<Item = usize>) -> Result<(), PlacementError> {
    for (i, id) in ids.enumerate() {
        if id != i + 1 {
            return Err(PlacementError::InvalidInstance(format!(
                "{what} #{} has id {id}, expected {}",
                i + 1,
                i + 1
            )));
        }
    }
    Ok(())
}

fn zero_based(what: &str, id: usize, count: usize) -> Result<usize, PlacementError> {
    if id == 0 || id > count {
        return Err(PlacementError::InvalidInstance(format!(
            "{what} refers to unknown id {id}"
        )));
    }
    Ok(id - 1)
}

impl Instance {
    pub fn from_toml_str(text: &str) -> Result<Self, InstanceError> {
        let doc: Doc = toml::from_str(text)?;
        check_ids("component", doc.application.component.iter().map(|c| c.id))?;
        check_ids("node", doc.network.node.iter().map(|n| n.id))?;
        let (n, m) = (doc.application.component.len(), doc.network.node.len());
        let components = doc
            .application
            .component
            .iter()
            .map(|c| AppComponent {
                resources: c.R_t,
                output: c.O_t,
                compute: c.S_t,
            })
            .collect();
        let edges = doc
            .application
            .edge
            .iter()
            .map(|e| Ok((zero_based("edge", e.from, n)?, zero_based("edge", e.to, n)?)))
            .collect::<Result<Vec<_>, PlacementError>>()?;
        let nodes = doc
            .network
            .node
            .iter()
            .map(|d| NetNode {
                speedup: d.P_n,
                resources: d.R_n,
                energy_per_unit: d.C_n,
                kind: d.kind,
            })
            .collect();
        let links = doc
            .network
            .link
            .iter()
            .map(|l| {
                Ok(NetLink {
                    a: zero_based("link", l.a, m)?,
                    b: zero_based("link", l.b, m)?,
                    energy: l.T_l,
                })
            })
            .collect::<Result<Vec<_>, PlacementError>>()?;
        Ok(Self {
            app: AppGraph::new(components, edges, doc.application.shape)?,
            net: NetGraph::new(nodes, links)?,
        })
    }

    pub fn to_toml_string(&self) -> Result<String, InstanceError> {
        let doc = Doc {
            application: AppDoc {
                shape: self.app.shape(),
                component: self
                    .app
                    .components()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| ComponentDoc {
                        id: i + 1,
                        R_t: c.resources,
                        O_t: c.output,
                        S_t: c.compute,
                    })
                    .collect(),
                edge: self
                    .app
                    .edges()
                    .iter()
                    .map(|&(a, b)| EdgeDoc {
                        from: a + 1,
                        to: b + 1,
                    })
                    .collect(),
            },
            network: NetDoc {
                node: self
                    .net
                    .nodes()
                    .iter()
                    .enumerate()
                    .map(|(i, n)| NodeDoc {
                        id: i + 1,
                        kind: n.kind,
                        P_n: n.speedup,
                        R_n: n.resources,
                        C_n: n.energy_per_unit,
                    })
                    .collect(),
                link: self
                    .net
                    .links()
                    .iter()
                    .map(|l| LinkDoc {
                        a: l.a + 1,
                        b: l.b + 1,
                        T_l: l.energy,
                    })
                    .collect(),
            },
        };
        Ok(toml::to_string(&doc)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, InstanceError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), InstanceError> {
        Ok(std::fs::write(path, self.to_toml_string()?)?)
    }
}
