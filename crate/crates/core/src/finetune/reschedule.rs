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

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::detect::ConflictClique;
use super::position::position_confluence_slots;
use crate::arith::modulo;
use crate::error::{Error, Result};
use crate::model::{FlowId, Instance, LinkId, RouteHop};
use crate::scheduler::{OccupancyEngine, ScheduleSolution, Traffic};
use crate::synthesis::GlobalCliqueIndex;

/// The frames of `parent` injected at `basetime + k·period`, split off for re-scheduling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubFlow {
    pub parent: FlowId,
    /// Link of the conflict clique the sub-flow was carved from.
    pub link: LinkId,
    pub length: u64,
    /// `p̈`; a multiple of the parent period.
    pub period: u64,
    /// `ḃ`, reduced modulo `period`; congruent to the parent basetime modulo its period.
    pub basetime: u64,
    pub parent_offset: u64,
    /// Parent's exclusive offset bound `ō`.
    pub offset_bound: u64,
    /// Allowed deviation from the parent offset, `j̊ − 2`.
    pub max_deviation: u64,
    pub hops: Vec<RouteHop>,
}

impl SubFlow {
    pub fn traffic(&self) -> Traffic<'_> {
        Traffic { id: self.parent, length: self.length, period: self.period, basetime: self.basetime, hops: &self.hops }
    }

    /// Inclusive offset window `[(o − j̇)⁺, min(o + j̇, ō − 1)]`.
    pub fn window(&self) -> (u64, u64) {
        let lo = self.parent_offset.saturating_sub(self.max_deviation);
        let hi = (self.parent_offset + self.max_deviation).min(self.offset_bound - 1);
        (lo, hi)
    }
}

/// A re-scheduled sub-flow. The parent keeps its offset for every other frame.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubFlowAssignment {
    pub parent: FlowId,
    pub link: LinkId,
    pub period: u64,
    pub basetime: u64,
    pub offset: u64,
}

/// The first sub-flow without a feasible offset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub parent: FlowId,
    pub link: LinkId,
    pub period: u64,
    pub basetime: u64,
    /// Inclusive offset window that was scanned.
    pub window: (u64, u64),
    /// Lowest local peak seen in the window, bytes.
    pub best_peak: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReschedulingSolution {
    pub entries: Vec<SubFlowAssignment>,
    pub failure: Option<FailureReport>,
}

impl ReschedulingSolution {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    pub fn into_result(self) -> Result<Vec<SubFlowAssignment>> {
        match self.failure {
            None => Ok(self.entries),
            Some(f) => Err(Error::InfeasibleSubFlow { parent: f.parent, link: f.link }),
        }
    }
}

/// One sub-flow per member flow of the lightest node (ties by tuple) of every conflict
/// clique. Sub-flows with the same parent, basetime and period are emitted once.
pub fn backtrack_subflows(
    conflicts: &[ConflictClique],
    instance: &Instance,
    solution: &ScheduleSolution,
) -> Result<Vec<SubFlow>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for clique in conflicts {
        let confluence = match clique.confluence {
            Some(c) => c,
            None => position_confluence_slots(&clique.nodes.iter().map(|n| n.tuple).collect::<Vec<_>>())?,
        };
        let Some(chosen) = clique.nodes.iter().min_by_key(|n| (n.weight, n.tuple)) else {
            continue;
        };
        let members: BTreeSet<FlowId> = chosen.members.iter().copied().collect();
        for id in members {
            let flow = instance.flow(id).ok_or_else(|| Error::InvalidFlow(format!("unknown flow {id}")))?;
            let offset = solution
                .offset(id)
                .ok_or_else(|| Error::Schema(format!("no offset for flow {id}")))?;
            let hop = flow.hop(clique.link).ok_or(Error::LinkNotOnRoute { flow: id, link: clique.link })?;
            let basetime = modulo(confluence.q as i128 - (hop.depth + offset) as i128, confluence.period);
            debug_assert_eq!(confluence.period % flow.period, 0);
            debug_assert_eq!(basetime % flow.period, flow.basetime);
            if !seen.insert((id, basetime, confluence.period)) {
                continue;
            }
            out.push(SubFlow {
                parent: id,
                link: clique.link,
                length: flow.length,
                period: confluence.period,
                basetime,
                parent_offset: offset,
                offset_bound: flow.offset_bound(),
                max_deviation: flow.jitter - 2,
                hops: flow.hops.clone(),
            });
        }
    }
    Ok(out)
}

/// First-fit placement of every sub-flow inside its window against the clique index.
/// Occupancy of the carved frames is left in the index, so checks are conservative.
/// Stops at the first sub-flow with no offset whose local peak fits `capacity`.
pub fn reschedule_subflows(
    subflows: &[SubFlow],
    index: &mut GlobalCliqueIndex,
    capacity: u64,
) -> Result<ReschedulingSolution> {
    let mut out = ReschedulingSolution::default();
    for sub in subflows {
        let traffic = sub.traffic();
        let (lo, hi) = sub.window();
        let mut best_peak = u64::MAX;
        let mut accepted = None;
        for o in lo..=hi {
            let peak = index.peak(&traffic, o);
            best_peak = best_peak.min(peak);
            if peak <= capacity {
                accepted = Some(o);
                break;
            }
        }
        match accepted {
            Some(o) => {
                index.commit(&traffic, o)?;
                out.entries.push(SubFlowAssignment {
                    parent: sub.parent,
                    link: sub.link,
                    period: sub.period,
                    basetime: sub.basetime,
                    offset: o,
                });
            }
            None => {
                out.failure = Some(FailureReport {
                    parent: sub.parent,
                    link: sub.link,
                    period: sub.period,
                    basetime: sub.basetime,
                    window: (lo, hi),
                    best_peak,
                });
                break;
            }
        }
    }
    Ok(out)
}
