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

use super::occupancy::{horizon_with_cap, SlotOccupancyMap};
use crate::error::{Error, Result};
use crate::hypergraph::{CliqueSet, LinkGraph};
use crate::model::{LinkId, SlotFlow};
use crate::scheduler::{
    schedule_with, sort_for_scheduling, OccupancyEngine, PartitionOutcome, ScheduleSolution, SchedulerConfig, Traffic,
};

/// Explicit per-slot byte lists over the hyper-period.
#[derive(Clone, Debug)]
pub struct FrameEngine {
    horizon: u64,
    slots: BTreeMap<LinkId, Vec<u32>>,
}

impl FrameEngine {
    pub fn new(horizon: u64) -> Self {
        Self { horizon, slots: BTreeMap::new() }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn into_map(self) -> SlotOccupancyMap {
        SlotOccupancyMap { horizon: self.horizon, links: self.slots }
    }
}

impl OccupancyEngine for FrameEngine {
    fn peak(&self, traffic: &Traffic<'_>, offset: u64) -> u64 {
        debug_assert_eq!(self.horizon % traffic.period, 0);
        traffic
            .hops
            .iter()
            .map(|hop| {
                let busiest = self.slots.get(&hop.link).map_or(0, |slots| {
                    let q = traffic.tuple(hop, offset).q as usize;
                    slots[q..].iter().step_by(traffic.period as usize).copied().max().map_or(0, u64::from)
                });
                busiest + traffic.length
            })
            .max()
            .unwrap_or(0)
    }

    fn commit(&mut self, traffic: &Traffic<'_>, offset: u64) -> Result<()> {
        if !self.horizon.is_multiple_of(traffic.period) {
            return Err(Error::InvalidFlow(format!(
                "period {} does not divide the horizon {}",
                traffic.period, self.horizon
            )));
        }
        let h = self.horizon as usize;
        let bytes = u32::try_from(traffic.length)
            .map_err(|_| Error::ArithmeticOverflow(format!("frame of {} bytes", traffic.length)))?;
        for hop in traffic.hops {
            let slots = self.slots.entry(hop.link).or_insert_with(|| vec![0; h]);
            let q = traffic.tuple(hop, offset).q as usize;
            for s in slots[q..].iter_mut().step_by(traffic.period as usize) {
                *s = s
                    .checked_add(bytes)
                    .ok_or_else(|| Error::ArithmeticOverflow(format!("slot on link {} exceeds u32 bytes", hop.link)))?;
            }
        }
        Ok(())
    }
}

/// The offset search of one partition driven by explicit slot lists.
pub fn frame_based_schedule(
    flows: &[&SlotFlow],
    config: &SchedulerConfig,
    horizon_cap: u64,
) -> Result<(PartitionOutcome, FrameEngine)> {
    let c = horizon_with_cap(flows.iter().map(|f| f.period), horizon_cap)?;
    let ordered = sort_for_scheduling(flows, config.sort);
    let mut engine = FrameEngine::new(c);
    let outcome = schedule_with(&ordered, &mut engine, config)?;
    Ok((outcome, engine))
}

/// Maximal cliques of the one-node-per-flow graph of `link`, enumerated in batch.
/// Clique keys list one tuple per member flow.
pub fn flow_graph_cliques(flows: &[SlotFlow], solution: &ScheduleSolution, link: LinkId) -> Result<CliqueSet> {
    let mut graph = LinkGraph::new_flow_graph(link);
    for flow in flows {
        let Some(hop) = flow.hop(link) else { continue };
        let offset = solution.offset(flow.id).ok_or_else(|| Error::Schema(format!("no offset for flow {}", flow.id)))?;
        graph.commit(flow.tuple_at(hop, offset), flow.length, flow.id)?;
    }
    graph.rebuild_cliques();
    Ok(graph.clique_set())
}
