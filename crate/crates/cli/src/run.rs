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

//! The `generate`, `schedule` and `validate` subcommands.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use hyperflow::io::{case_to_json, read_case, read_solution, write_solution, SolutionFile};
use hyperflow::model::{generate_case, Case, CaseSpec, Instance};
use hyperflow::oracle::{validate as oracle_validate, Validation, DEFAULT_HORIZON_CAP};
use hyperflow::pipeline::{self, PipelineConfig, PipelineReport};
use serde::Serialize;

use crate::{CaseArgs, GenerateArgs, ScheduleArgs, SchedulerArgs, ValidateArgs};

/// Non-error result of a subcommand.
pub enum Outcome {
    Ok,
    /// Re-scheduling failed or the oracle found violations.
    Infeasible,
}

impl CaseArgs {
    pub fn spec(&self) -> CaseSpec {
        CaseSpec {
            topology: self.topology,
            switches: self.switches,
            hosts_per_switch: self.hosts_per_switch,
            flows: self.flows,
            period_type: self.period_type,
            seed: self.seed,
            multicast_ratio: self.multicast_ratio,
            menu: self.menu,
        }
    }
}

impl SchedulerArgs {
    pub fn config(&self, capacity: u64) -> PipelineConfig {
        let mut cfg = PipelineConfig::new(capacity);
        cfg.scheduler.rho = self.rho;
        cfg.scheduler.sort = self.sort;
        cfg.scheduler.early_break = self.early_break;
        cfg.scheduler.goal = self.goal;
        cfg.basis = self.partition_basis;
        cfg.partition_scale = self.partition_scale;
        cfg.engine = self.engine;
        cfg.workers = self.workers;
        cfg
    }
}

pub fn instance_of(case: &Case) -> Result<Instance> {
    Ok(Instance::ingest(&case.topology, &case.flows, case.slot.clone())?)
}

pub fn capacity_of(instance: &Instance, explicit: Option<u64>) -> Result<u64> {
    match explicit {
        Some(0) => anyhow::bail!(hyperflow::Error::InvalidConfig("capacity must be positive".into())),
        Some(c) => Ok(c),
        None => Ok(instance.capacity()?),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

pub fn generate(args: &GenerateArgs) -> Result<Outcome> {
    let case = generate_case(&args.case.spec())?;
    emit(args.output.as_deref(), &case_to_json(&case)?)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct ScheduleMetrics<'a> {
    engine: String,
    flows: usize,
    capacity: u64,
    partitions: usize,
    synthesis_skipped: bool,
    max_clique_weight: u64,
    clique_count: usize,
    /// Largest per-link graph degeneracy; 0 for engines without a clique index.
    max_degeneracy: usize,
    evaluations: u64,
    ccr: Option<&'a hyperflow::pipeline::CcrOutcome>,
    timings: &'a hyperflow::pipeline::PhaseTimings,
    validation: Option<Validation>,
}

pub fn schedule(args: &ScheduleArgs) -> Result<Outcome> {
    let case = read_case(&args.case).with_context(|| format!("reading {}", args.case.display()))?;
    let instance = instance_of(&case)?;
    let capacity = capacity_of(&instance, args.scheduler.capacity)?;
    let cfg = args.scheduler.config(capacity);
    let report: PipelineReport = pipeline::run(&instance, &cfg)?;
    if report.synthesis_skipped {
        eprintln!("synthesis skipped ({} partition(s), engine {})", report.partitions, report.engine);
    }
    write_solution(&args.output, &SolutionFile::new(&report.solution, report.ccr.as_ref()))
        .with_context(|| format!("writing {}", args.output.display()))?;

    let validation = if args.no_validate {
        None
    } else {
        let (mut v, _) = oracle_validate(&instance, &report.solution, cfg.scheduler.rho, capacity, cfg.horizon_cap)?;
        v.metrics.runtime_ms = report.timings.total_ms;
        Some(v)
    };
    let invalid = validation.as_ref().is_some_and(|v| !v.is_valid());
    let metrics = ScheduleMetrics {
        engine: report.engine.to_string(),
        flows: instance.len(),
        capacity,
        partitions: report.partitions,
        synthesis_skipped: report.synthesis_skipped,
        max_clique_weight: report.max_occupancy,
        clique_count: report.clique_count,
        max_degeneracy: report
            .index
            .as_ref()
            .and_then(|i| i.graphs().values().map(|g| g.degeneracy()).max())
            .unwrap_or(0),
        evaluations: report.evaluations,
        ccr: report.ccr.as_ref(),
        timings: &report.timings,
        validation,
    };
    emit(args.metrics.as_deref(), &serde_json::to_string_pretty(&metrics)?)?;
    if !report.succeeded() {
        eprintln!("re-scheduling failed: {:?}", report.ccr.as_ref().and_then(|c| c.rescheduling.failure.as_ref()));
        return Ok(Outcome::Infeasible);
    }
    if invalid {
        eprintln!("schedule violates constraints");
        return Ok(Outcome::Infeasible);
    }
    Ok(Outcome::Ok)
}

pub fn validate(args: &ValidateArgs) -> Result<Outcome> {
    let case = read_case(&args.case).with_context(|| format!("reading {}", args.case.display()))?;
    let instance = instance_of(&case)?;
    let file = read_solution(&args.solution).with_context(|| format!("reading {}", args.solution.display()))?;
    let solution = file.to_solution(&instance)?;
    let capacity = capacity_of(&instance, args.capacity)?;
    let (validation, _) = oracle_validate(&instance, &solution, args.rho, capacity, DEFAULT_HORIZON_CAP)?;
    emit(None, &serde_json::to_string_pretty(&validation)?)?;
    Ok(if validation.is_valid() { Outcome::Ok } else { Outcome::Infeasible })
}
