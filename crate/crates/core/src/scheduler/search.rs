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

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{HfgEngine, OccupancyEngine, Traffic};
use super::partition::{sort_for_scheduling, PartitionPlan, SortStrategy};
use crate::error::{Error, Result};
use crate::finetune::SubFlowAssignment;
use crate::model::{FlowId, Instance, SlotFlow};

/// Objective evaluated per candidate offset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalKind {
    /// Weighted latency plus network-wide peak occupancy.
    #[default]
    Composite,
    /// Occupancy of the flow's own slots only, `ζ̃ / Λ`.
    Nob,
}

/// Stopping rule of the offset scan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EarlyBreak {
    /// Scan the full range `[0, ō)`.
    Disabled,
    /// Stop once the best value is at or below the lower bound of every later offset.
    #[default]
    Threshold,
    /// Stop once the best candidate keeps the peak at `max(ζ̄, l)`.
    Fits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    /// Weight of the occupancy term, in `[0, 1]`.
    pub rho: f64,
    /// Slot capacity Λ in bytes.
    pub capacity: u64,
    pub sort: SortStrategy,
    pub early_break: EarlyBreak,
    pub goal: GoalKind,
}

impl SchedulerConfig {
    pub fn new(capacity: u64) -> Self {
        Self {
            rho: 0.5,
            capacity,
            sort: SortStrategy::default(),
            early_break: EarlyBreak::default(),
            goal: GoalKind::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!("rho {} outside [0, 1]", self.rho)));
        }
        if self.capacity == 0 {
            return Err(Error::InvalidConfig("slot capacity must be positive".into()));
        }
        Ok(())
    }
}

/// `(1 − ρ)·o/(n·d̊) + ρ·ζ̄/Λ`.
pub fn local_goal(offset: u64, scheduled: usize, deadline: u64, peak: u64, capacity: u64, rho: f64) -> f64 {
    (1.0 - rho) * offset as f64 / (scheduled as f64 * deadline as f64) + rho * peak as f64 / capacity as f64
}

/// Lower bound on the goal of every offset after `offset`: the latency term at
/// `offset + 1` and the occupancy term at its floor `max(ζ̄, l)`.
pub fn early_break_threshold(
    offset: u64,
    scheduled: usize,
    deadline: u64,
    global_peak: u64,
    length: u64,
    capacity: u64,
    rho: f64,
) -> f64 {
    local_goal(offset + 1, scheduled, deadline, global_peak.max(length), capacity, rho)
}

/// `ζ̄_o`: what the global peak would become if `traffic` were committed at `offset`.
pub fn max_occupancy_under_offset<E: OccupancyEngine + ?Sized>(
    engine: &E,
    traffic: &Traffic<'_>,
    offset: u64,
    global_peak: u64,
) -> u64 {
    engine.peak(traffic, offset).max(global_peak)
}

/// Offset search bookkeeping for one flow plus the partition-wide peak.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchState {
    /// Best goal so far; non-increasing within one flow's scan.
    pub best_value: f64,
    pub best_offset: u64,
    /// Local peak at `best_offset`.
    pub best_local: u64,
    /// Peak over all slots of the partition; non-decreasing across commits.
    pub global_peak: u64,
    /// Flows scheduled so far, the current one included.
    pub scheduled: usize,
}

impl SearchState {
    fn new() -> Self {
        Self { best_value: f64::INFINITY, best_offset: 0, best_local: 0, global_peak: 0, scheduled: 0 }
    }

    fn reset(&mut self) {
        self.best_value = f64::INFINITY;
        self.best_offset = 0;
        self.best_local = 0;
        self.scheduled += 1;
    }
}

/// Offsets chosen for one partition, in scheduling order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionOutcome {
    pub offsets: Vec<(FlowId, u64)>,
    /// Peak slot occupancy after the last commit.
    pub max_occupancy: u64,
    /// Number of candidate offsets evaluated.
    pub evaluations: u64,
}

/// Greedy offset assignment over `ordered` against any occupancy engine.
pub fn schedule_with<E: OccupancyEngine + ?Sized>(
    ordered: &[&SlotFlow],
    engine: &mut E,
    config: &SchedulerConfig,
) -> Result<PartitionOutcome> {
    config.validate()?;
    let (cap, rho) = (config.capacity, config.rho);
    let mut state = SearchState::new();
    let mut out = PartitionOutcome { offsets: Vec::with_capacity(ordered.len()), ..Default::default() };
    for flow in ordered {
        let traffic = Traffic::of(flow);
        state.reset();
        let n = state.scheduled;
        for o in 0..flow.offset_bound() {
            let local = engine.peak(&traffic, o);
            let zeta = local.max(state.global_peak);
            let value = match config.goal {
                GoalKind::Composite => local_goal(o, n, flow.deadline, zeta, cap, rho),
                GoalKind::Nob => local as f64 / cap as f64,
            };
            out.evaluations += 1;
            if value < state.best_value {
                state.best_value = value;
                state.best_offset = o;
                state.best_local = local;
            }
            let stop = match (config.early_break, config.goal) {
                (EarlyBreak::Disabled, _) => false,
                (EarlyBreak::Threshold, GoalKind::Composite) => {
                    state.best_value
                        <= early_break_threshold(o, n, flow.deadline, state.global_peak, flow.length, cap, rho)
                }
                (EarlyBreak::Threshold, GoalKind::Nob) => state.best_value <= flow.length as f64 / cap as f64,
                (EarlyBreak::Fits, GoalKind::Composite) => {
                    state.best_local.max(state.global_peak) <= state.global_peak.max(flow.length)
                }
                (EarlyBreak::Fits, GoalKind::Nob) => state.best_local <= flow.length,
            };
            if stop {
                break;
            }
        }
        engine.commit(&traffic, state.best_offset)?;
        state.global_peak = state.global_peak.max(state.best_local);
        out.offsets.push((flow.id, state.best_offset));
    }
    out.max_occupancy = state.global_peak;
    Ok(out)
}

/// Sorts one partition and schedules it on a fresh hyper-flow engine.
pub fn schedule_partition(
    flows: &[&SlotFlow],
    config: &SchedulerConfig,
) -> Result<(PartitionOutcome, HfgEngine)> {
    let ordered = sort_for_scheduling(flows, config.sort);
    let mut engine = HfgEngine::new();
    let outcome = schedule_with(&ordered, &mut engine, config)?;
    Ok((outcome, engine))
}

/// Schedules every partition independently; results are in partition order.
pub fn run_parallel(
    plan: &PartitionPlan,
    instance: &Instance,
    config: &SchedulerConfig,
) -> Result<Vec<(PartitionOutcome, HfgEngine)>> {
    plan.partitions
        .par_iter()
        .map(|ids| {
            let flows = ids
                .iter()
                .map(|&id| instance.flow(id).ok_or_else(|| Error::InvalidFlow(format!("unknown flow {id}"))))
                .collect::<Result<Vec<_>>>()?;
            schedule_partition(&flows, config)
        })
        .collect()
}

/// Final artifact: one offset per flow plus re-scheduled sub-flows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleSolution {
    pub offsets: BTreeMap<FlowId, u64>,
    pub subflows: Vec<SubFlowAssignment>,
}

impl ScheduleSolution {
    pub fn from_outcomes<'a, I: IntoIterator<Item = &'a PartitionOutcome>>(outcomes: I) -> Self {
        let offsets = outcomes.into_iter().flat_map(|o| o.offsets.iter().copied()).collect();
        Self { offsets, subflows: Vec::new() }
    }

    pub fn offset(&self, flow: FlowId) -> Option<u64> {
        self.offsets.get(&flow).copied()
    }

    /// Offsets of `flow`'s sub-flows, in record order.
    pub fn subflow_offsets(&self, flow: FlowId) -> Vec<u64> {
        self.subflows.iter().filter(|s| s.parent == flow).map(|s| s.offset).collect()
    }
}
