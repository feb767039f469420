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

//! Brute-force ground truth: explicit slot occupancy over the hyper-period,
//! the frame-based and flow-graph baselines, and schedule validation.

mod frame;
mod occupancy;
mod validate;

pub use frame::{flow_graph_cliques, frame_based_schedule, FrameEngine};
pub use occupancy::{brute_force_occupancy, horizon, horizon_with_cap, SlotOccupancyMap, DEFAULT_HORIZON_CAP};
pub use validate::{validate, Metrics, Validation};
