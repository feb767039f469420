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

//! Versioned JSON files for cases and solutions.
//!
//! Case file: `{version, units, slot, topology: {nodes, links}, flows}` with times in
//! microseconds and lengths in bytes. Solution file: `{version, offsets: [{flow,
//! offset_slots}], subflows, ccr}` with every offset in slots.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finetune::{FailureReport, SubFlowAssignment};
use crate::model::{Case, Flow, FlowId, Instance, NetworkGraph, SlotConfig};
use crate::pipeline::CcrOutcome;
use crate::scheduler::ScheduleSolution;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Units {
    pub time: String,
    pub length: String,
}

impl Default for Units {
    fn default() -> Self {
        Self { time: "us".into(), length: "bytes".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseFile {
    pub version: u32,
    pub units: Units,
    pub slot: SlotConfig,
    pub topology: NetworkGraph,
    pub flows: Vec<Flow>,
}

impl CaseFile {
    pub fn from_case(case: &Case) -> Self {
        Self {
            version: FORMAT_VERSION,
            units: Units::default(),
            slot: case.slot.clone(),
            topology: case.topology.clone(),
            flows: case.flows.clone(),
        }
    }

    pub fn into_case(self) -> Result<Case> {
        check_version(self.version)?;
        if self.units != Units::default() {
            return Err(Error::Schema(format!("unsupported units {:?}", self.units)));
        }
        Ok(Case { slot: self.slot, topology: self.topology, flows: self.flows })
    }
}

fn check_version(version: u32) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Schema(format!("unsupported format version {version}")));
    }
    Ok(())
}

pub fn case_to_json(case: &Case) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CaseFile::from_case(case))?)
}

pub fn case_from_json(text: &str) -> Result<Case> {
    serde_json::from_str::<CaseFile>(text)?.into_case()
}

pub fn write_case(path: impl AsRef<Path>, case: &Case) -> Result<()> {
    Ok(fs::write(path, case_to_json(case)? + "\n")?)
}

pub fn read_case(path: impl AsRef<Path>) -> Result<Case> {
    case_from_json(&fs::read_to_string(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffsetEntry {
    pub flow: FlowId,
    pub offset_slots: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcrSummary {
    pub succeeded: bool,
    pub overflow_cliques: usize,
    pub conflict_cliques: usize,
    pub subflows: usize,
    pub failure: Option<FailureReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub version: u32,
    pub offsets: Vec<OffsetEntry>,
    #[serde(default)]
    pub subflows: Vec<SubFlowAssignment>,
    #[serde(default)]
    pub ccr: Option<CcrSummary>,
}

impl SolutionFile {
    pub fn new(solution: &ScheduleSolution, ccr: Option<&CcrOutcome>) -> Self {
        Self {
            version: FORMAT_VERSION,
            offsets: solution.offsets.iter().map(|(&flow, &offset_slots)| OffsetEntry { flow, offset_slots }).collect(),
            subflows: solution.subflows.clone(),
            ccr: ccr.map(|c| CcrSummary {
                succeeded: c.succeeded(),
                overflow_cliques: c.overflow_cliques,
                conflict_cliques: c.conflict_cliques,
                subflows: c.subflows,
                failure: c.rescheduling.failure.clone(),
            }),
        }
    }

    /// The solution, checked to name every flow of `instance` exactly once.
    pub fn to_solution(&self, instance: &Instance) -> Result<ScheduleSolution> {
        check_version(self.version)?;
        let mut offsets = BTreeMap::new();
        for e in &self.offsets {
            if instance.flow(e.flow).is_none() {
                return Err(Error::Schema(format!("offset for unknown flow {}", e.flow)));
            }
            if offsets.insert(e.flow, e.offset_slots).is_some() {
                return Err(Error::Schema(format!("flow {} listed twice", e.flow)));
            }
        }
        if let Some(missing) = instance.flows().iter().find(|f| !offsets.contains_key(&f.id)) {
            return Err(Error::Schema(format!("missing offset entry for flow {}", missing.id)));
        }
        Ok(ScheduleSolution { offsets, subflows: self.subflows.clone() })
    }
}

pub fn write_solution(path: impl AsRef<Path>, file: &SolutionFile) -> Result<()> {
    Ok(fs::write(path, serde_json::to_string_pretty(file)? + "\n")?)
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<SolutionFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
