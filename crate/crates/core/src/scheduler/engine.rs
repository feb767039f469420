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

use crate::error::Result;
use crate::hypergraph::{FeatureTuple, LinkGraph};
use crate::model::{FlowId, LinkId, RouteHop, SlotFlow};

/// The periodic frame sequence an engine places: a whole flow or one of its sub-flows.
#[derive(Clone, Copy, Debug)]
pub struct Traffic<'a> {
    /// Owning flow; sub-flows carry their parent's id.
    pub id: FlowId,
    pub length: u64,
    pub period: u64,
    /// Basetime in slots, taken modulo `period`.
    pub basetime: u64,
    pub hops: &'a [RouteHop],
}

impl<'a> Traffic<'a> {
    pub fn of(flow: &'a SlotFlow) -> Self {
        Self { id: flow.id, length: flow.length, period: flow.period, basetime: flow.basetime, hops: &flow.hops }
    }

    pub fn tuple(&self, hop: &RouteHop, offset: u64) -> FeatureTuple {
        FeatureTuple::new(self.basetime + offset + hop.depth, self.period)
    }
}

/// Slot-occupancy state the offset search consults and updates.
pub trait OccupancyEngine {
    /// Heaviest slot over the route if `traffic` were committed at `offset`, its own
    /// bytes included. Must not change observable state.
    fn peak(&self, traffic: &Traffic<'_>, offset: u64) -> u64;

    fn commit(&mut self, traffic: &Traffic<'_>, offset: u64) -> Result<()>;
}

/// Per-link hyper-flow graphs with incrementally maintained cliques.
#[derive(Clone, Debug, Default)]
pub struct HfgEngine {
    graphs: BTreeMap<LinkId, LinkGraph>,
    flow_graph: bool,
}

impl HfgEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Keeps every committed flow as its own node (no tuple merging).
    pub fn flow_graph() -> Self {
        Self { graphs: BTreeMap::new(), flow_graph: true }
    }

    pub fn from_graphs(graphs: BTreeMap<LinkId, LinkGraph>) -> Self {
        let flow_graph = graphs.values().any(LinkGraph::is_flow_graph);
        Self { graphs, flow_graph }
    }

    pub fn graphs(&self) -> &BTreeMap<LinkId, LinkGraph> {
        &self.graphs
    }

    pub fn into_graphs(self) -> BTreeMap<LinkId, LinkGraph> {
        self.graphs
    }

    pub fn graph(&self, link: LinkId) -> Option<&LinkGraph> {
        self.graphs.get(&link)
    }

    pub fn max_clique_weight(&self) -> u64 {
        self.graphs.values().map(LinkGraph::max_clique_weight).max().unwrap_or(0)
    }

    pub fn clique_count(&self) -> usize {
        self.graphs.values().map(LinkGraph::clique_count).sum()
    }
}

impl OccupancyEngine for HfgEngine {
    fn peak(&self, traffic: &Traffic<'_>, offset: u64) -> u64 {
        traffic
            .hops
            .iter()
            .map(|hop| match self.graphs.get(&hop.link) {
                Some(g) => g.peak_with(traffic.tuple(hop, offset), traffic.length),
                None => traffic.length,
            })
            .max()
            .unwrap_or(0)
    }

    fn commit(&mut self, traffic: &Traffic<'_>, offset: u64) -> Result<()> {
        for hop in traffic.hops {
            let flow_graph = self.flow_graph;
            let graph = self.graphs.entry(hop.link).or_insert_with(|| {
                if flow_graph {
                    LinkGraph::new_flow_graph(hop.link)
                } else {
                    LinkGraph::new(hop.link)
                }
            });
            graph.commit(traffic.tuple(hop, offset), traffic.length, traffic.id)?;
        }
        Ok(())
    }
}
