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


//! Independent reference computations shared by the integration and acceptance tests.
//! Nothing here calls into the library's graph, oracle or arithmetic code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hyperflow::hypergraph::FeatureTuple;
use hyperflow::model::{Instance, RouteHop, SlotConfig, SlotFlow};
use hyperflow::scheduler::ScheduleSolution;
use hyperflow::{FlowId, LinkId};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn naive_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        naive_gcd(b, a % b)
    }
}

pub fn naive_lcm(values: impl IntoIterator<Item = u64>) -> u64 {
    values.into_iter().fold(1, |acc, v| acc / naive_gcd(acc, v) * v)
}

/// Two progressions meet iff some slot in `[0, lcm)` lies on both; checked by scanning.
pub fn meet_by_scan(a: FeatureTuple, b: FeatureTuple) -> bool {
    let l = naive_lcm([a.period, b.period]);
    (0..l).any(|s| s % a.period == a.q && s % b.period == b.q)
}

/// Random flows on `links` links with periods drawn from `periods` (slots).
pub fn random_instance(rng: &mut impl Rng, max_flows: usize, max_links: u32, periods: &[u64]) -> Instance {
    let n = rng.gen_range(1..=max_flows);
    let links = rng.gen_range(1..=max_links);
    let all: Vec<u32> = (0..links).collect();
    let flows = (0..n)
        .map(|i| {
            let period = *periods.choose(rng).unwrap();
            let hop_count = rng.gen_range(1..=links as usize);
            let chosen: Vec<u32> = all.choose_multiple(rng, hop_count).copied().collect();
            let hops: Vec<RouteHop> = chosen
                .iter()
                .enumerate()
                .map(|(d, &l)| RouteHop { link: LinkId(l), depth: d as u64 })
                .collect();
            let h = hops.len() as u64 - 1;
            let deadline = rng.gen_range(h + 2..=h + 1 + 2 * period);
            SlotFlow::new(
                FlowId(i as u32),
                rng.gen_range(64..=1500),
                period,
                rng.gen_range(0..period),
                deadline,
                rng.gen_range(2..=period.max(2)),
                hops,
            )
            .unwrap()
        })
        .collect();
    Instance::new(SlotConfig::default(), flows).unwrap()
}

pub fn random_offsets(rng: &mut impl Rng, instance: &Instance) -> ScheduleSolution {
    ScheduleSolution {
        offsets: instance.flows().iter().map(|f| (f.id, rng.gen_range(0..f.offset_bound()))).collect(),
        subflows: Vec::new(),
    }
}

/// Bytes per slot of `[0, C)` per link, by enumerating every frame of every flow.
/// A frame injected at `t` belongs to the first re-scheduled sub-flow containing it.
pub fn replay(instance: &Instance, solution: &ScheduleSolution) -> BTreeMap<LinkId, Vec<u64>> {
    let periods = instance
        .flows()
        .iter()
        .map(|f| f.period)
        .chain(solution.subflows.iter().map(|s| s.period));
    let c = naive_lcm(periods);
    let mut out: BTreeMap<LinkId, Vec<u64>> = BTreeMap::new();
    for f in instance.flows() {
        let own = solution.offsets[&f.id];
        let subs: Vec<_> = solution.subflows.iter().filter(|s| s.parent == f.id).collect();
        let mut t = f.basetime;
        while t < c {
            let o = subs.iter().find(|s| t % s.period == s.basetime).map_or(own, |s| s.offset);
            for hop in &f.hops {
                out.entry(hop.link).or_insert_with(|| vec![0; c as usize])[((t + o + hop.depth) % c) as usize] +=
                    f.length;
            }
            t += f.period;
        }
    }
    out
}

/// Every maximal clique of the graph on `tuples` under the scan-based adjacency,
/// by exhaustive subset search. Exponential; keep `tuples` short.
pub fn naive_maximal_cliques(tuples: &[FeatureTuple]) -> BTreeSet<BTreeSet<FeatureTuple>> {
    let n = tuples.len();
    assert!(n <= 20);
    let adj: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a != b && meet_by_scan(tuples[a], tuples[b])).collect()).collect();
    let is_clique = |mask: u32| (0..n).all(|a| mask >> a & 1 == 0 || (0..n).all(|b| a == b || mask >> b & 1 == 0 || adj[a][b]));
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        if is_clique(mask) && !(0..n).any(|v| mask >> v & 1 == 0 && is_clique(mask | 1 << v)) {
            out.insert((0..n).filter(|v| mask >> v & 1 == 1).map(|v| tuples[v]).collect());
        }
    }
    out
}

/// Subsets (index lists) over `capacity` whose every proper subset fits.
pub fn naive_minimal_overweight(weights: &[u64], capacity: u64) -> BTreeSet<Vec<usize>> {
    let n = weights.len();
    let sum = |mask: u32| (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| weights[i]).sum::<u64>();
    (1u32..1 << n)
        .filter(|&mask| {
            sum(mask) > capacity
                && (0..n).filter(|&i| mask >> i & 1 == 1).all(|i| sum(mask & !(1 << i)) <= capacity)
        })
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Mean of `(o + h + 1) / d` over flows, `o` the latest offset among a flow's portions.
pub fn realtime_rate(instance: &Instance, solution: &ScheduleSolution) -> f64 {
    let sum: f64 = instance
        .flows()
        .iter()
        .map(|f| {
            let o = solution
                .subflows
                .iter()
                .filter(|s| s.parent == f.id)
                .map(|s| s.offset)
                .fold(solution.offsets[&f.id], u64::max);
            (o + f.hop_count + 1) as f64 / f.deadline as f64
        })
        .sum();
    sum / instance.len() as f64
}
