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

//! `hyperflow`: generate cases, schedule them, validate solutions, run benchmarks.
//!
//! Exit codes: 0 success, 1 infeasible or invalid schedule, 2 usage or input error.

mod bench;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperflow::model::{PeriodMenu, TopologyKind};
use hyperflow::pipeline::Engine;
use hyperflow::scheduler::{EarlyBreak, GoalKind, PartitionBasis, SortStrategy};

#[derive(Parser)]
#[command(name = "hyperflow", version, about = "Offset scheduling for CQF time-sensitive networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic case (topology and flows) as JSON.
    Generate(GenerateArgs),
    /// Schedule a case and write the solution.
    Schedule(ScheduleArgs),
    /// Check a solution against a case with the slot-level oracle.
    Validate(ValidateArgs),
    /// Run a benchmark matrix and write averaged CSV rows.
    Bench(bench::BenchArgs),
}

#[derive(Args, Clone)]
struct CaseArgs {
    #[arg(long, default_value = "linear", value_parser = parse::<TopologyKind>)]
    topology: TopologyKind,
    #[arg(long, default_value_t = 200)]
    flows: usize,
    /// Period type 1..=4; periods span up to 200 ms times the type.
    #[arg(long, default_value_t = 1)]
    period_type: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    switches: u32,
    #[arg(long, default_value_t = 2)]
    hosts_per_switch: u32,
    /// Probability that a flow is multicast.
    #[arg(long, default_value_t = 0.2)]
    multicast_ratio: f64,
    #[arg(long, default_value = "divisors", value_parser = parse::<PeriodMenu>)]
    menu: PeriodMenu,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SchedulerArgs {
    /// Weight of the occupancy term in the goal.
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Flows per partition.
    #[arg(long, default_value_t = 500)]
    partition_scale: usize,
    #[arg(long, default_value = "period", value_parser = parse::<PartitionBasis>)]
    partition_basis: PartitionBasis,
    /// period-asc|period-desc|length-asc|length-desc|offset-bound-asc|offset-bound-desc|random:<seed>
    #[arg(long, default_value = "length-desc", value_parser = parse::<SortStrategy>)]
    sort: SortStrategy,
    /// Slot capacity in bytes; derived from the case's slot configuration when omitted.
    #[arg(long)]
    capacity: Option<u64>,
    /// threshold|fits|off
    #[arg(long, default_value = "threshold", value_parser = parse_break)]
    early_break: EarlyBreak,
    /// composite|nob
    #[arg(long, default_value = "composite", value_parser = parse_goal)]
    goal: GoalKind,
    /// hfg|frame-based|flow-graph
    #[arg(long, default_value = "hfg", value_parser = parse::<Engine>)]
    engine: Engine,
    #[arg(long, env = "HYPERFLOW_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args)]
struct ScheduleArgs {
    case: PathBuf,
    #[command(flatten)]
    scheduler: SchedulerArgs,
    /// Solution output file.
    #[arg(short, long, default_value = "solution.json")]
    output: PathBuf,
    /// Metrics JSON file; stdout when omitted.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Skip the oracle replay.
    #[arg(long)]
    no_validate: bool,
}

#[derive(Args)]
struct ValidateArgs {
    case: PathBuf,
    solution: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long)]
    capacity: Option<u64>,
}

fn parse<T: std::str::FromStr<Err = hyperflow::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: hyperflow::Error| e.to_string())
}

fn parse_break(s: &str) -> Result<EarlyBreak, String> {
    match s {
        "threshold" => Ok(EarlyBreak::Threshold),
        "fits" => Ok(EarlyBreak::Fits),
        "off" => Ok(EarlyBreak::Disabled),
        _ => Err(format!("unknown early-break rule {s:?}")),
    }
}

fn parse_goal(s: &str) -> Result<GoalKind, String> {
    match s {
        "composite" => Ok(GoalKind::Composite),
        "nob" => Ok(GoalKind::Nob),
        _ => Err(format!("unknown goal {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => run::generate(&args),
        Command::Schedule(args) => run::schedule(&args),
        Command::Validate(args) => run::validate(&args),
        Command::Bench(args) => bench::run(&args),
    };
    match result {
        Ok(run::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(run::Outcome::Infeasible) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<hyperflow::Error>() {
                Some(hyperflow::Error::Unschedulable { .. } | hyperflow::Error::InfeasibleSubFlow { .. }) => {
                    ExitCode::from(1)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}
