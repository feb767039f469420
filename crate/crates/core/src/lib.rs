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

//! Offset scheduling for periodic time-sensitive flows in a TSN configured
//! with cyclic queuing and forwarding (CQF).
//!
//! Flows that share the same forwarding arithmetic on a link are aggregated
//! into weighted hyper-flow nodes. Two nodes are adjacent when their slot
//! progressions intersect, so the occupancy of every slot is carried by a
//! clique and the worst slot is the heaviest maximal clique. The scheduler is
//! organised in four phases:
//!
//! 1. [`scheduler::partition_flows`] slices the flow set by a sorted attribute.
//! 2. [`scheduler::run_parallel`] schedules every partition independently with
//!    incremental clique maintenance and an early-break offset search.
//! 3. [`synthesis::synthesize`] merges per-partition graphs link by link and
//!    re-enumerates maximal cliques.
//! 4. [`finetune`] carves minimal overweight cliques into sub-flows and
//!    re-schedules them inside their jitter window.
//!
//! [`oracle`] holds the brute-force slot machinery every equivalence is
//! checked against, and [`pipeline`] wires the phases together.

pub mod arith;
pub mod error;
pub mod finetune;
pub mod hypergraph;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod scheduler;
pub mod synthesis;

pub use error::{Error, Result};
pub use model::{FlowId, LinkId, NodeId};
