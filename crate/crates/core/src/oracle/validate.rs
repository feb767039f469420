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

use serde::{Deserialize, Serialize};

use super::occupancy::{brute_force_occupancy, SlotOccupancyMap};
use crate::error::{Error, Result};
use crate::model::{check_constraints, Instance, Violation};
use crate::scheduler::ScheduleSolution;

/// Schedule quality under the composite goal.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `(1 − ρ)·realtime_rate + ρ·occupancy_rate`.
    pub goal: f64,
    /// Mean of `(o + h + 1) / d̊`, with `o` the largest offset among a flow's portions.
    pub realtime_rate: f64,
    /// Peak slot bytes over Λ.
    pub occupancy_rate: f64,
    pub max_occupancy: u64,
    pub runtime_ms: f64,
    pub schedulable: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub metrics: Metrics,
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks latency, jitter and capacity of a complete solution by exact replay.
/// Also returns the occupancy map it replayed.
pub fn validate(
    instance: &Instance,
    solution: &ScheduleSolution,
    rho: f64,
    capacity: u64,
    horizon_cap: u64,
) -> Result<(Validation, SlotOccupancyMap)> {
    for id in solution.offsets.keys() {
        if instance.flow(*id).is_none() {
            return Err(Error::Schema(format!("solution names unknown flow {id}")));
        }
    }
    for sub in &solution.subflows {
        let parent = instance
            .flow(sub.parent)
            .ok_or_else(|| Error::Schema(format!("sub-flow of unknown flow {}", sub.parent)))?;
        if sub.period == 0 || sub.period % parent.period != 0 || sub.basetime % parent.period != parent.basetime {
            return Err(Error::Schema(format!(
                "sub-flow ({}, {}) is not a sub-sequence of flow {}",
                sub.basetime, sub.period, sub.parent
            )));
        }
    }
    let map = brute_force_occupancy(instance.flows(), solution, horizon_cap)?;
    let mut violations = Vec::new();
    let mut rate_sum = 0.0;
    for flow in instance.flows() {
        let offset = solution.offset(flow.id).expect("checked by the replay");
        let subs = solution.subflow_offsets(flow.id);
        violations.extend(check_constraints(flow, offset, &subs));
        let worst = subs.iter().copied().fold(offset, u64::max);
        rate_sum += flow.worst_case_slots(worst) as f64 / flow.deadline as f64;
    }
    violations.extend(
        map.overflowing(capacity)
            .map(|(link, slot, occupancy)| Violation::Capacity { link, slot, occupancy, capacity }),
    );
    let realtime_rate = if instance.is_empty() { 0.0 } else { rate_sum / instance.len() as f64 };
    let max_occupancy = map.max();
    let occupancy_rate = max_occupancy as f64 / capacity as f64;
    let metrics = Metrics {
        goal: (1.0 - rho) * realtime_rate + rho * occupancy_rate,
        realtime_rate,
        occupancy_rate,
        max_occupancy,
        runtime_ms: 0.0,
        schedulable: violations.is_empty(),
    };
    Ok((Validation { metrics, violations }, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finetune::SubFlowAssignment;
    use crate::model::{FlowId, LinkId, RouteHop, SlotConfig, SlotFlow};
    use std::collections::BTreeMap;

    fn instance() -> Instance {
        let hops = vec![RouteHop { link: LinkId(0), depth: 0 }];
        let a = SlotFlow::new(FlowId(0), 7000, 8, 0, 8, 4, hops.clone()).unwrap();
        let b = SlotFlow::new(FlowId(1), 7000, 8, 0, 8, 4, hops).unwrap();
        Instance::new(SlotConfig::default(), vec![a, b]).unwrap()
    }

    fn offsets(a: u64, b: u64) -> ScheduleSolution {
        ScheduleSolution { offsets: BTreeMap::from([(FlowId(0), a), (FlowId(1), b)]), subflows: vec![] }
    }

    #[test]
    fn collision_is_a_capacity_violation() {
        let (v, _) = validate(&instance(), &offsets(0, 0), 0.5, 12300, 1 << 20).unwrap();
        assert_eq!(
            v.violations,
            vec![Violation::Capacity { link: LinkId(0), slot: 0, occupancy: 14000, capacity: 12300 }]
        );
        assert!(!v.metrics.schedulable);
    }

    #[test]
    fn feasible_solution_and_metrics() {
        let (v, _) = validate(&instance(), &offsets(0, 1), 0.0, 12300, 1 << 20).unwrap();
        assert!(v.is_valid());
        // (0+0+1)/8 and (1+0+1)/8.
        assert!((v.metrics.realtime_rate - 3.0 / 16.0).abs() < 1e-12);
        assert_eq!(v.metrics.goal, v.metrics.realtime_rate);
        assert_eq!(v.metrics.max_occupancy, 7000);
    }

    #[test]
    fn latency_and_schema_errors() {
        let (v, _) = validate(&instance(), &offsets(0, 8), 0.5, 12300, 1 << 20).unwrap();
        assert!(v.violations.contains(&Violation::Latency { flow: FlowId(1), offset: 8, bound: 8 }));
        let mut missing = offsets(0, 1);
        missing.offsets.remove(&FlowId(1));
        assert!(matches!(validate(&instance(), &missing, 0.5, 12300, 1 << 20), Err(Error::Schema(_))));
        let mut bad = offsets(0, 1);
        bad.subflows.push(SubFlowAssignment { parent: FlowId(0), link: LinkId(0), period: 12, basetime: 0, offset: 0 });
        assert!(matches!(validate(&instance(), &bad, 0.5, 12300, 1 << 20), Err(Error::Schema(_))));
    }

    #[test]
    fn subflow_jitter_is_checked() {
        let mut sol = offsets(0, 1);
        sol.subflows.push(SubFlowAssignment { parent: FlowId(0), link: LinkId(0), period: 16, basetime: 8, offset: 3 });
        let (v, _) = validate(&instance(), &sol, 0.5, 12300, 1 << 20).unwrap();
        assert!(v.violations.contains(&Violation::Jitter { flow: FlowId(0), deviation: 3, allowed: 2 }));
    }
}
