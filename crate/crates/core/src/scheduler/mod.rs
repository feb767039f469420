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

//! Partitioning and incremental offset search.
//!
//! Every partition is scheduled flow by flow. For each candidate offset the
//! heaviest slot the flow would join is read from an [`OccupancyEngine`]; the
//! hyper-flow engine answers from clique weights, the oracle's frame engine
//! from explicit slot arrays. Both feed the same decision rule, so they pick
//! the same offsets.

mod engine;
mod partition;
mod search;

pub use engine::{HfgEngine, OccupancyEngine, Traffic};
pub use partition::{partition_flows, sort_for_scheduling, PartitionBasis, PartitionPlan, SortStrategy};
pub use search::{
    early_break_threshold, local_goal, max_occupancy_under_offset, run_parallel, schedule_partition, schedule_with,
    EarlyBreak, GoalKind, PartitionOutcome, ScheduleSolution, SchedulerConfig, SearchState,
};
