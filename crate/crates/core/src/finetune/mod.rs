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

//! Conflict-clique re-scheduling.
//!
//! Overweight maximal cliques are narrowed to minimal overweight sub-cliques,
//! their common slots are located with the extended Euclidean algorithm, and
//! the frames of one node per sub-clique that land there are split off into
//! sub-flows and re-placed inside the parent's jitter window.

mod detect;
mod position;
mod reschedule;

pub use crate::arith::extended_euclid;
pub use detect::{
    detect_conflict_cliques, minimal_overweight_subsets, overflow_cliques, ConflictClique, OverflowClique,
    DEFAULT_DETECTION_BUDGET,
};
pub use position::position_confluence_slots;
pub use reschedule::{
    backtrack_subflows, reschedule_subflows, FailureReport, ReschedulingSolution, SubFlow, SubFlowAssignment,
};
