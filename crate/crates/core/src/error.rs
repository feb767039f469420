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

use crate::model::{FlowId, LinkId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("flow {flow}: period {period_us} us is not a multiple of the slot length {slot_us} us")]
    PeriodNotDivisible {
        flow: FlowId,
        period_us: u64,
        slot_us: u64,
    },
    #[error("flow {flow} is unschedulable: {reason}")]
    Unschedulable { flow: FlowId, reason: String },
    #[error("link {link} is not on the route of flow {flow}")]
    LinkNotOnRoute { flow: FlowId, link: LinkId },
    #[error("flow {flow} has an invalid route: {reason}")]
    InvalidRoute { flow: FlowId, reason: String },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("invalid slot configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid case specification: {0}")]
    InvalidSpec(String),
    #[error("feature tuple (q={q}, p={period}) already present on link {link}")]
    DuplicateTuple { link: LinkId, q: u64, period: u64 },
    #[error("feature tuple (q={q}, p={period}) not present on link {link}")]
    UnknownTuple { link: LinkId, q: u64, period: u64 },
    #[error("arithmetic overflow: {0}")]
    ArithmeticOverflow(String),
    #[error("scheduling horizon of {horizon} slots exceeds the cap of {cap} slots")]
    HorizonTooLarge { horizon: u128, cap: u64 },
    #[error("progressions do not share a common slot: {0}")]
    NotConfluent(String),
    #[error("conflict detection aborted after visiting {0} sub-cliques")]
    DetectionBudgetExceeded(u64),
    #[error("sub-flow of flow {parent} on link {link} has no feasible offset")]
    InfeasibleSubFlow { parent: FlowId, link: LinkId },
    #[error("not implemented: {0}")]
    Unimplemented(&'static str),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
