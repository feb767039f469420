// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LinkId, NodeId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Host,
    Switch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub src: NodeId,
    pub dst: NodeId,
}

#[derive(Serialize, Deserialize)]
struct TopologyRepr {
    nodes: Vec<Node>,
    links: Vec<Link>,
}

/// Directed network of hosts and switches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TopologyRepr", into = "TopologyRepr")]
pub struct NetworkGraph {
    nodes: BTreeMap<NodeId, NodeKind>,
    links: BTreeMap<LinkId, Link>,
    by_pair: BTreeMap<(NodeId, NodeId), LinkId>,
}

impl NetworkGraph {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self> {
        let mut node_map = BTreeMap::new();
        for node in nodes {
            if node_map.insert(node.id, node.kind).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate node id {}", node.id)));
            }
        }
        let mut link_map = BTreeMap::new();
        let mut by_pair = BTreeMap::new();
        for link in links {
            for end in [link.src, link.dst] {
                if !node_map.contains_key(&end) {
                    return Err(Error::InvalidNetwork(format!(
                        "link {} references undeclared node {end}",
                        link.id
                    )));
                }
            }
            if link.src == link.dst {
                return Err(Error::InvalidNetwork(format!("link {} is a self-loop", link.id)));
            }
            if by_pair.insert((link.src, link.dst), link.id).is_some() {
                return Err(Error::InvalidNetwork(format!(
                    "more than one link from {} to {}",
                    link.src, link.dst
                )));
            }
            if link_map.insert(link.id, link).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate link id {}", link.id)));
            }
        }
        Ok(Self {
            nodes: node_map,
            links: link_map,
            by_pair,
        })
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.get(&id)
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.values()
    }

    pub fn node_kind(&self, id: NodeId) -> Option<NodeKind> {
        self.nodes.get(&id).copied()
    }

    pub fn is_host(&self, id: NodeId) -> bool {
        self.node_kind(id) == Some(NodeKind::Host)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.nodes.iter().map(|(&id, &kind)| Node { id, kind })
    }

    pub fn link_between(&self, src: NodeId, dst: NodeId) -> Option<LinkId> {
        self.by_pair.get(&(src, dst)).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }
}

impl TryFrom<TopologyRepr> for NetworkGraph {
    type Error = Error;

    fn try_from(repr: TopologyRepr) -> Result<Self> {
        NetworkGraph::new(repr.nodes, repr.links)
    }
}

impl From<NetworkGraph> for TopologyRepr {
    fn from(graph: NetworkGraph) -> Self {
        TopologyRepr {
            nodes: graph.nodes().collect(),
            links: graph.links.into_values().collect(),
        }
    }
}
