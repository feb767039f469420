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

//! Benchmark matrix: engines × flow counts × topologies × period types × ρ × capacity factors.
//!
//! Every cell is run `repeats` times with seeds `seed..seed+repeats` and one
//! averaged CSV row is written per cell. The column set is fixed by [`Row`].

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use hyperflow::model::{generate_case, CaseSpec, PeriodMenu, TopologyKind};
use hyperflow::oracle::validate;
use hyperflow::pipeline::{self, Engine};
use serde::Serialize;

use crate::run::{capacity_of, instance_of, Outcome};
use crate::{parse, SchedulerArgs};

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "hfg", value_parser = parse::<Engine>)]
    engines: Vec<Engine>,
    #[arg(long, value_delimiter = ',', default_value = "200")]
    flows: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "linear", value_parser = parse::<TopologyKind>)]
    topologies: Vec<TopologyKind>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    period_types: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    rhos: Vec<f64>,
    /// Multipliers applied to the derived slot capacity.
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    capacity_factors: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    repeats: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "divisors", value_parser = parse::<PeriodMenu>)]
    menu: PeriodMenu,
    #[command(flatten)]
    scheduler: SchedulerArgs,
    /// CSV output; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// One averaged cell. Counts are means over the repeats.
#[derive(Serialize, Default)]
struct Row {
    engine: String,
    topology: String,
    period_type: u8,
    flows: usize,
    rho: f64,
    capacity_factor: f64,
    partition_scale: usize,
    /// First seed; the cell covers `seed..seed + repeats`.
    seed: u64,
    repeats: u64,
    runtime_ms: f64,
    schedule_ms: f64,
    synthesis_ms: f64,
    finetune_ms: f64,
    goal: f64,
    realtime_rate: f64,
    occupancy_rate: f64,
    max_occupancy: f64,
    schedulable_rate: f64,
    ccr_rate: f64,
    ccr_success_rate: f64,
    evaluations: f64,
    clique_count: f64,
    occupied_slots: f64,
    graph_nodes: f64,
    flow_link_pairs: f64,
    /// Largest per-link degeneracy of the clique index.
    degeneracy: f64,
}

pub fn run(args: &BenchArgs) -> Result<Outcome> {
    anyhow::ensure!(args.repeats > 0, hyperflow::Error::InvalidConfig("repeats must be positive".into()));
    let sink: Box<dyn std::io::Write> = match &args.output {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    for &engine in &args.engines {
        for &flows in &args.flows {
            for &topology in &args.topologies {
                for &period_type in &args.period_types {
                    for &rho in &args.rhos {
                        for &factor in &args.capacity_factors {
                            let row = cell(args, engine, flows, topology, period_type, rho, factor)?;
                            csv.serialize(row)?;
                            csv.flush()?;
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome::Ok)
}

fn cell(
    args: &BenchArgs,
    engine: Engine,
    flows: usize,
    topology: TopologyKind,
    period_type: u8,
    rho: f64,
    factor: f64,
) -> Result<Row> {
    anyhow::ensure!(factor > 0.0, hyperflow::Error::InvalidConfig("capacity factor must be positive".into()));
    let mut row = Row {
        engine: engine.to_string(),
        topology: topology.to_string(),
        period_type,
        flows,
        rho,
        capacity_factor: factor,
        partition_scale: args.scheduler.partition_scale,
        seed: args.seed,
        repeats: args.repeats,
        ..Row::default()
    };
    for seed in args.seed..args.seed + args.repeats {
        let mut spec = CaseSpec::new(topology, flows, period_type, seed);
        spec.menu = args.menu;
        let case = generate_case(&spec)?;
        let instance = instance_of(&case)?;
        let base = capacity_of(&instance, args.scheduler.capacity)?;
        let capacity = ((base as f64 * factor).round() as u64).max(1);
        let mut cfg = args.scheduler.config(capacity);
        cfg.engine = engine;
        cfg.scheduler.rho = rho;
        let report = pipeline::run(&instance, &cfg)?;
        let (v, map) = validate(&instance, &report.solution, rho, capacity, cfg.horizon_cap)?;

        row.runtime_ms += report.timings.total_ms;
        row.schedule_ms += report.timings.schedule_ms;
        row.synthesis_ms += report.timings.synthesis_ms;
        row.finetune_ms += report.timings.finetune_ms;
        row.goal += v.metrics.goal;
        row.realtime_rate += v.metrics.realtime_rate;
        row.occupancy_rate += v.metrics.occupancy_rate;
        row.max_occupancy += v.metrics.max_occupancy as f64;
        row.schedulable_rate += f64::from(u8::from(v.is_valid()));
        row.ccr_rate += f64::from(u8::from(report.ccr.is_some()));
        row.ccr_success_rate += f64::from(u8::from(report.ccr.as_ref().is_some_and(|c| c.succeeded())));
        row.evaluations += report.evaluations as f64;
        row.occupied_slots += map.links.keys().map(|&l| map.occupied_slots(l)).sum::<usize>() as f64;
        row.flow_link_pairs += instance.flows().iter().map(|f| f.hops.len()).sum::<usize>() as f64;
        if let Some(index) = &report.index {
            row.clique_count += index.clique_count() as f64;
            row.graph_nodes += index.graphs().values().map(|g| g.node_count()).sum::<usize>() as f64;
            row.degeneracy += index.graphs().values().map(|g| g.degeneracy()).max().unwrap_or(0) as f64;
        }
    }
    let n = args.repeats as f64;
    for v in [
        &mut row.runtime_ms,
        &mut row.schedule_ms,
        &mut row.synthesis_ms,
        &mut row.finetune_ms,
        &mut row.goal,
        &mut row.realtime_rate,
        &mut row.occupancy_rate,
        &mut row.max_occupancy,
        &mut row.schedulable_rate,
        &mut row.ccr_rate,
        &mut row.ccr_success_rate,
        &mut row.evaluations,
        &mut row.clique_count,
        &mut row.occupied_slots,
        &mut row.graph_nodes,
        &mut row.flow_link_pairs,
        &mut row.degeneracy,
    ] {
        *v /= n;
    }
    Ok(row)
}
