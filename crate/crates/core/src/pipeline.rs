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

//! The four phases wired together.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finetune::{
    backtrack_subflows, detect_conflict_cliques, overflow_cliques, position_confluence_slots, reschedule_subflows,
    ConflictClique, ReschedulingSolution, DEFAULT_DETECTION_BUDGET,
};
use crate::hypergraph::FeatureTuple;
use crate::model::{Instance, LinkId};
use crate::oracle::{frame_based_schedule, DEFAULT_HORIZON_CAP};
use crate::scheduler::{
    partition_flows, run_parallel, schedule_with, sort_for_scheduling, HfgEngine, PartitionBasis, PartitionOutcome,
    ScheduleSolution, SchedulerConfig,
};
use crate::synthesis::{max_global_occupancy, synthesize, GlobalCliqueIndex};

/// Occupancy engine of the offset search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Hyper-flow graphs, synthesis and re-scheduling.
    #[default]
    Hfg,
    /// Explicit slot lists; partitions only, no synthesis or re-scheduling.
    FrameBased,
    /// One node per flow; partitions only, no synthesis or re-scheduling.
    FlowGraph,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hfg" => Ok(Self::Hfg),
            "frame-based" | "frame" => Ok(Self::FrameBased),
            "flow-graph" => Ok(Self::FlowGraph),
            _ => Err(Error::InvalidConfig(format!("unknown engine {s:?}"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hfg => "hfg",
            Self::FrameBased => "frame-based",
            Self::FlowGraph => "flow-graph",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub scheduler: SchedulerConfig,
    pub basis: PartitionBasis,
    /// Flows per partition, Ξ.
    pub partition_scale: usize,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub engine: Engine,
    /// Re-scheduling rounds; only a single round is supported.
    pub ccr_rounds: u32,
    pub detection_budget: u64,
    pub horizon_cap: u64,
}

impl PipelineConfig {
    pub fn new(capacity: u64) -> Self {
        Self {
            scheduler: SchedulerConfig::new(capacity),
            basis: PartitionBasis::default(),
            partition_scale: 500,
            workers: None,
            engine: Engine::default(),
            ccr_rounds: 1,
            detection_budget: DEFAULT_DETECTION_BUDGET,
            horizon_cap: DEFAULT_HORIZON_CAP,
        }
    }
}

/// Wall-clock time per phase, milliseconds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub partition_ms: f64,
    pub schedule_ms: f64,
    pub synthesis_ms: f64,
    pub finetune_ms: f64,
    pub total_ms: f64,
}

/// What the re-scheduling phase did.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcrOutcome {
    pub overflow_cliques: usize,
    pub conflict_cliques: usize,
    pub subflows: usize,
    pub rescheduling: ReschedulingSolution,
}

impl CcrOutcome {
    pub fn succeeded(&self) -> bool {
        self.rescheduling.succeeded()
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PipelineReport {
    pub engine: Engine,
    pub partitions: usize,
    pub synthesis_skipped: bool,
    /// Offsets before re-scheduling.
    pub preliminary: ScheduleSolution,
    /// Preliminary offsets plus re-scheduled sub-flows.
    pub solution: ScheduleSolution,
    /// Heaviest clique (or slot) after phase 3, before re-scheduling.
    pub max_occupancy: u64,
    pub clique_count: usize,
    pub evaluations: u64,
    /// `None` when no clique overflowed or the engine does not re-schedule.
    pub ccr: Option<CcrOutcome>,
    pub timings: PhaseTimings,
    /// Clique index after re-scheduling; hyper-flow engine only.
    #[serde(skip)]
    pub index: Option<GlobalCliqueIndex>,
}

impl PipelineReport {
    /// False only when re-scheduling ran and failed.
    pub fn succeeded(&self) -> bool {
        self.ccr.as_ref().is_none_or(CcrOutcome::succeeded)
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Partition, schedule, synthesise and re-schedule `instance`.
pub fn run(instance: &Instance, config: &PipelineConfig) -> Result<PipelineReport> {
    if config.ccr_rounds != 1 {
        return Err(Error::Unimplemented("multi-round conflict re-scheduling"));
    }
    config.scheduler.validate()?;
    match config.workers {
        Some(0) => Err(Error::InvalidConfig("worker count must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| run_inner(instance, config)),
        None => run_inner(instance, config),
    }
}

fn run_inner(instance: &Instance, config: &PipelineConfig) -> Result<PipelineReport> {
    let total = Instant::now();
    let mut report = PipelineReport { engine: config.engine, ..Default::default() };

    let start = Instant::now();
    let plan = partition_flows(instance.flows(), config.basis, config.partition_scale)?;
    report.partitions = plan.len();
    report.timings.partition_ms = ms(start);

    let start = Instant::now();
    if config.engine != Engine::Hfg {
        let outcomes = plan
            .partitions
            .par_iter()
            .map(|ids| {
                let flows: Vec<_> = ids.iter().filter_map(|&id| instance.flow(id)).collect();
                match config.engine {
                    Engine::FrameBased => frame_based_schedule(&flows, &config.scheduler, config.horizon_cap).map(|r| r.0),
                    _ => {
                        let ordered = sort_for_scheduling(&flows, config.scheduler.sort);
                        let mut engine = HfgEngine::flow_graph();
                        schedule_with(&ordered, &mut engine, &config.scheduler)
                    }
                }
            })
            .collect::<Result<Vec<PartitionOutcome>>>()?;
        report.timings.schedule_ms = ms(start);
        report.synthesis_skipped = true;
        report.max_occupancy = outcomes.iter().map(|o| o.max_occupancy).max().unwrap_or(0);
        report.evaluations = outcomes.iter().map(|o| o.evaluations).sum();
        report.preliminary = ScheduleSolution::from_outcomes(&outcomes);
        report.solution = report.preliminary.clone();
        report.timings.total_ms = ms(total);
        return Ok(report);
    }

    let fragments = run_parallel(&plan, instance, &config.scheduler)?;
    report.timings.schedule_ms = ms(start);
    report.evaluations = fragments.iter().map(|(o, _)| o.evaluations).sum();
    report.preliminary = ScheduleSolution::from_outcomes(fragments.iter().map(|(o, _)| o));

    let start = Instant::now();
    let mut graphs: Vec<_> = fragments.into_iter().map(|(_, e)| e.into_graphs()).collect();
    let mut index = if graphs.len() <= 1 {
        report.synthesis_skipped = true;
        GlobalCliqueIndex::from_graphs(graphs.pop().unwrap_or_default())
    } else {
        synthesize(graphs)?
    };
    report.max_occupancy = max_global_occupancy(&index);
    report.clique_count = index.clique_count();
    report.timings.synthesis_ms = ms(start);

    let start = Instant::now();
    let capacity = config.scheduler.capacity;
    let overflow = overflow_cliques(&index, capacity);
    report.solution = report.preliminary.clone();
    if !overflow.is_empty() {
        let conflicts = conflict_cliques(&overflow, capacity, config.detection_budget)?;
        let subflows = backtrack_subflows(&conflicts, instance, &report.preliminary)?;
        let rescheduling = reschedule_subflows(&subflows, &mut index, capacity)?;
        report.solution.subflows = rescheduling.entries.clone();
        report.ccr = Some(CcrOutcome {
            overflow_cliques: overflow.len(),
            conflict_cliques: conflicts.len(),
            subflows: subflows.len(),
            rescheduling,
        });
    }
    report.timings.finetune_ms = ms(start);
    report.index = Some(index);
    report.timings.total_ms = ms(total);
    Ok(report)
}

/// Detected and positioned conflict cliques, deduplicated per link, in link then tuple order.
fn conflict_cliques(
    overflow: &[crate::finetune::OverflowClique],
    capacity: u64,
    budget: u64,
) -> Result<Vec<ConflictClique>> {
    let detected = overflow
        .par_iter()
        .map(|c| detect_conflict_cliques(c, capacity, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut seen: BTreeSet<(LinkId, Vec<FeatureTuple>)> = BTreeSet::new();
    let mut out = Vec::new();
    for mut clique in detected.into_iter().flatten() {
        let tuples: Vec<_> = clique.nodes.iter().map(|n| n.tuple).collect();
        if seen.insert((clique.link, tuples.clone())) {
            clique.confluence = Some(position_confluence_slots(&tuples)?);
            out.push(clique);
        }
    }
    out.sort_by(|a, b| {
        (a.link, a.nodes.iter().map(|n| n.tuple).collect::<Vec<_>>())
            .cmp(&(b.link, b.nodes.iter().map(|n| n.tuple).collect::<Vec<_>>()))
    });
    Ok(out)
}
