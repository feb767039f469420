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


mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use hyperflow::finetune::{
    detect_conflict_cliques, overflow_cliques, position_confluence_slots, DEFAULT_DETECTION_BUDGET,
};
use hyperflow::hypergraph::{merge_graphs, LinkGraph};
use hyperflow::model::Instance;
use hyperflow::oracle::{frame_based_schedule, validate, DEFAULT_HORIZON_CAP};
use hyperflow::pipeline::{self, PipelineConfig};
use hyperflow::scheduler::{
    max_occupancy_under_offset, partition_flows, run_parallel, schedule_partition, EarlyBreak, GoalKind,
    HfgEngine, OccupancyEngine, PartitionBasis, ScheduleSolution, SchedulerConfig, SortStrategy, Traffic,
};
use hyperflow::synthesis::{max_global_occupancy, synthesize, GlobalCliqueIndex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PERIODS: [u64; 6] = [8, 12, 16, 24, 32, 48];

fn instance(seed: u64, flows: usize) -> Instance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), flows, 4, &PERIODS)
}

fn global_peak(slots: &BTreeMap<hyperflow::LinkId, Vec<u64>>) -> u64 {
    slots.values().flat_map(|v| v.iter().copied()).max().unwrap_or(0)
}

fn config(rho: f64, goal: GoalKind, capacity: u64) -> SchedulerConfig {
    let mut cfg = SchedulerConfig::new(capacity);
    cfg.rho = rho;
    cfg.goal = goal;
    cfg
}

fn goal_strategy() -> impl Strategy<Value = GoalKind> {
    prop_oneof![Just(GoalKind::Composite), Just(GoalKind::Nob)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scheduler_peak_matches_replay(seed in any::<u64>(), rho in 0.0f64..=1.0) {
        let inst = instance(seed, 20);
        let flows: Vec<_> = inst.flows().iter().collect();
        let (outcome, engine) = schedule_partition(&flows, &config(rho, GoalKind::Composite, 4000)).unwrap();
        let sol = ScheduleSolution::from_outcomes([&outcome]);
        let peak = global_peak(&replay(&inst, &sol));
        prop_assert_eq!(outcome.max_occupancy, peak);
        prop_assert_eq!(engine.max_clique_weight(), peak);
        for f in inst.flows() {
            prop_assert!(sol.offsets[&f.id] < f.offset_bound());
        }
    }

    #[test]
    fn peak_query_predicts_commit(seed in any::<u64>()) {
        let inst = instance(seed, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let sol = random_offsets(&mut rng, &inst);
        let mut engine = HfgEngine::new();
        let mut committed = ScheduleSolution::default();
        let mut peak = 0;
        for f in inst.flows() {
            let o = sol.offsets[&f.id];
            let predicted = max_occupancy_under_offset(&engine, &Traffic::of(f), o, peak);
            engine.commit(&Traffic::of(f), o).unwrap();
            committed.offsets.insert(f.id, o);
            let sub = Instance::new(inst.config.clone(), inst.flows().iter().filter(|g| committed.offsets.contains_key(&g.id)).cloned().collect()).unwrap();
            peak = global_peak(&replay(&sub, &committed));
            prop_assert_eq!(predicted, peak);
        }
    }

    #[test]
    fn early_break_preserves_offsets(seed in any::<u64>(), rho in 0.0f64..=1.0, goal in goal_strategy()) {
        let inst = instance(seed, 25);
        let flows: Vec<_> = inst.flows().iter().collect();
        let mut cfg = config(rho, goal, 3000);
        let (with_break, _) = schedule_partition(&flows, &cfg).unwrap();
        cfg.early_break = EarlyBreak::Disabled;
        let (full, _) = schedule_partition(&flows, &cfg).unwrap();
        prop_assert_eq!(&with_break.offsets, &full.offsets);
        prop_assert!(with_break.evaluations <= full.evaluations);
    }

    #[test]
    fn fits_rule_matches_threshold_at_full_occupancy_weight(seed in any::<u64>()) {
        let inst = instance(seed, 25);
        let flows: Vec<_> = inst.flows().iter().collect();
        let mut cfg = config(1.0, GoalKind::Composite, 3000);
        let (threshold, _) = schedule_partition(&flows, &cfg).unwrap();
        cfg.early_break = EarlyBreak::Fits;
        let (fits, _) = schedule_partition(&flows, &cfg).unwrap();
        prop_assert_eq!(threshold.offsets, fits.offsets);
    }

    #[test]
    fn frame_engine_agrees_with_hyper_flow_engine(seed in any::<u64>(), rho in 0.0f64..=1.0, sort_seed in any::<u64>()) {
        let inst = instance(seed, 25);
        let flows: Vec<_> = inst.flows().iter().collect();
        let mut cfg = config(rho, GoalKind::Composite, 3000);
        cfg.sort = SortStrategy::Random(sort_seed);
        let (hfg, _) = schedule_partition(&flows, &cfg).unwrap();
        let (frame, _) = frame_based_schedule(&flows, &cfg, DEFAULT_HORIZON_CAP).unwrap();
        prop_assert_eq!(hfg, frame);
    }

    #[test]
    fn synthesis_equals_pooled_graph(seed in any::<u64>(), scale in 2usize..10) {
        let inst = instance(seed, 30);
        let plan = partition_flows(inst.flows(), PartitionBasis::Length, scale).unwrap();
        let cfg = config(0.5, GoalKind::Composite, 3000);
        let fragments = run_parallel(&plan, &inst, &cfg).unwrap();
        let sol = ScheduleSolution::from_outcomes(fragments.iter().map(|(o, _)| o));
        let graphs: Vec<_> = fragments.into_iter().map(|(_, e)| e.into_graphs()).collect();
        let merged = synthesize(graphs.clone()).unwrap();

        let mut pooled = HfgEngine::new();
        for f in inst.flows() {
            pooled.commit(&Traffic::of(f), sol.offsets[&f.id]).unwrap();
        }
        prop_assert_eq!(merged.clique_sets(), GlobalCliqueIndex::from_graphs(pooled.into_graphs()).clique_sets());
        prop_assert_eq!(max_global_occupancy(&merged), global_peak(&replay(&inst, &sol)));

        let link = *merged.graphs().keys().next().unwrap();
        let parts: Vec<&LinkGraph> = graphs.iter().filter_map(|g| g.get(&link)).collect();
        let direct = merge_graphs(link, parts).unwrap();
        prop_assert_eq!(direct.clique_set(), merged.graph(link).unwrap().clique_set());
    }

    #[test]
    fn confluence_slots_cover_exactly_the_overflowing_slots(seed in any::<u64>(), cap in 1500u64..4000) {
        let inst = instance(seed, 20);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let sol = random_offsets(&mut rng, &inst);
        let mut engine = HfgEngine::new();
        for f in inst.flows() {
            engine.commit(&Traffic::of(f), sol.offsets[&f.id]).unwrap();
        }
        let index = GlobalCliqueIndex::from_graphs(engine.into_graphs());
        let slots = replay(&inst, &sol);
        let c = slots.values().next().map_or(1, |v| v.len() as u64);
        let mut covered: BTreeSet<(hyperflow::LinkId, u64)> = BTreeSet::new();
        for clique in overflow_cliques(&index, cap) {
            for conflict in detect_conflict_cliques(&clique, cap, DEFAULT_DETECTION_BUDGET).unwrap() {
                let tuples: Vec<_> = conflict.nodes.iter().map(|n| n.tuple).collect();
                let z = position_confluence_slots(&tuples).unwrap();
                prop_assert!(conflict.weight > cap);
                covered.extend((z.q..c).step_by(z.period as usize).map(|s| (conflict.link, s)));
            }
        }
        let overflowing: BTreeSet<_> = slots
            .iter()
            .flat_map(|(&l, v)| v.iter().enumerate().filter(|&(_, &b)| b > cap).map(move |(s, _)| (l, s as u64)))
            .collect();
        prop_assert_eq!(covered, overflowing);
    }
}

#[test]
fn rescheduled_subflows_are_sub_sequences_inside_their_window() {
    let mut checked = 0;
    for seed in 0..40 {
        let inst = instance(seed, 30);
        let report = pipeline::run(&inst, &PipelineConfig::new(2500)).unwrap();
        let Some(ccr) = &report.ccr else { continue };
        for sub in &ccr.rescheduling.entries {
            let parent = inst.flow(sub.parent).unwrap();
            assert_eq!(sub.period % parent.period, 0);
            assert_eq!(sub.basetime % parent.period, parent.basetime);
            let o = report.preliminary.offsets[&sub.parent];
            let j = parent.jitter - 2;
            assert!(sub.offset + j >= o && sub.offset <= o + j && sub.offset < parent.offset_bound());
            checked += 1;
        }
        let (v, map) = validate(&inst, &report.solution, 0.5, 2500, DEFAULT_HORIZON_CAP).unwrap();
        let want = replay(&inst, &report.solution);
        for (link, occ) in &want {
            for (s, &b) in occ.iter().enumerate() {
                assert_eq!(map.get(*link, s as u64), b);
            }
        }
        if report.succeeded() {
            assert!(map.max() <= 2500, "seed {seed}: success-flagged run overflows");
            assert!(v.is_valid(), "seed {seed}: {:?}", v.violations);
        }
    }
    assert!(checked > 0, "no sub-flow was re-scheduled");
}

#[test]
fn worker_count_does_not_change_the_result() {
    let inst = instance(11, 60);
    let mut cfg = PipelineConfig::new(2500);
    cfg.partition_scale = 7;
    let serial = pipeline::run(&inst, &cfg).unwrap();
    cfg.workers = Some(3);
    let pooled = pipeline::run(&inst, &cfg).unwrap();
    assert_eq!(serial.solution, pooled.solution);
    assert_eq!(serial.clique_count, pooled.clique_count);
    assert!(!serial.synthesis_skipped);
}

#[test]
fn multi_round_rescheduling_is_reported_unimplemented() {
    let inst = instance(3, 5);
    let mut cfg = PipelineConfig::new(2500);
    cfg.ccr_rounds = 2;
    assert!(matches!(pipeline::run(&inst, &cfg), Err(hyperflow::Error::Unimplemented(_))));
}
