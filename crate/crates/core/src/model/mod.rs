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

//! Networks, flows, slot arithmetic and synthetic case generation.

mod flow;
mod generate;
mod network;
mod slot;

pub use flow::{
    check_constraints, to_slot_domain, worst_case_latency_us, Flow, Instance, Route, RouteHop,
    SlotFlow, TreeLink, Violation,
};
pub use generate::{build_topology, generate_case, period_menu, Case, CaseSpec, PeriodMenu, TopologyKind};
pub use network::{Link, NetworkGraph, Node, NodeKind};
pub use slot::{slot_capacity, SlotConfig};

use serde::{Deserialize, Serialize};
use std::fmt;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

id_type!(
    /// Host or switch.
    NodeId
);
id_type!(
    /// Directed physical link.
    LinkId
);
id_type!(FlowId);
