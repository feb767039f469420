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

//! Link-parallel merge of per-partition graphs into one clique index.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hypergraph::{merge_graphs, CliqueSet, GraphDump, LinkGraph};
use crate::model::LinkId;
use crate::scheduler::{HfgEngine, OccupancyEngine, Traffic};

/// Maximal cliques of every link over all partitions' committed flows.
#[derive(Clone, Debug, Default)]
pub struct GlobalCliqueIndex {
    engine: HfgEngine,
}

impl GlobalCliqueIndex {
    /// Adopts a single partition's graphs as they are.
    pub fn from_graphs(graphs: BTreeMap<LinkId, LinkGraph>) -> Self {
        Self { engine: HfgEngine::from_graphs(graphs) }
    }

    pub fn graphs(&self) -> &BTreeMap<LinkId, LinkGraph> {
        self.engine.graphs()
    }

    pub fn graph(&self, link: LinkId) -> Option<&LinkGraph> {
        self.engine.graph(link)
    }

    pub fn clique_sets(&self) -> BTreeMap<LinkId, CliqueSet> {
        self.graphs().iter().map(|(&l, g)| (l, g.clique_set())).collect()
    }

    pub fn clique_count(&self) -> usize {
        self.engine.clique_count()
    }

    pub fn dump(&self) -> IndexDump {
        IndexDump { links: self.graphs().values().map(LinkGraph::dump).collect() }
    }
}

impl OccupancyEngine for GlobalCliqueIndex {
    fn peak(&self, traffic: &Traffic<'_>, offset: u64) -> u64 {
        self.engine.peak(traffic, offset)
    }

    fn commit(&mut self, traffic: &Traffic<'_>, offset: u64) -> Result<()> {
        self.engine.commit(traffic, offset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDump {
    pub links: Vec<GraphDump>,
}

/// Merges the graphs of every link across partitions and re-enumerates its cliques.
/// Links are independent; the result does not depend on processing order.
pub fn synthesize(partitions: Vec<BTreeMap<LinkId, LinkGraph>>) -> Result<GlobalCliqueIndex> {
    let mut by_link: BTreeMap<LinkId, Vec<LinkGraph>> = BTreeMap::new();
    for graphs in partitions {
        for (link, graph) in graphs {
            by_link.entry(link).or_default().push(graph);
        }
    }
    let merged = by_link
        .into_par_iter()
        .map(|(link, graphs)| merge_graphs(link, graphs.iter()).map(|g| (link, g)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GlobalCliqueIndex::from_graphs(merged.into_iter().collect()))
}

/// Heaviest clique over all links.
pub fn max_global_occupancy(index: &GlobalCliqueIndex) -> u64 {
    index.engine.max_clique_weight()
}
