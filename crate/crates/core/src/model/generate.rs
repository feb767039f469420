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

//! Synthetic flow cases over linear, ring and tree switch topologies.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Flow, FlowId, Link, LinkId, NetworkGraph, Node, NodeId, NodeKind, Route, SlotConfig, TreeLink};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Linear,
    Ring,
    Tree,
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "ring" => Ok(Self::Ring),
            "tree" => Ok(Self::Tree),
            other => Err(Error::InvalidSpec(format!("unknown topology {other:?}"))),
        }
    }
}

impl std::fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Ring => "ring",
            Self::Tree => "tree",
        })
    }
}

/// Which discrete period values the generator draws from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodMenu {
    /// Divisors of 277200 ms: many co-prime factors, hyper-period of 2217600 slots at 125 us.
    #[default]
    Divisors,
    /// A short binary/decimal ladder with a 200 ms hyper-period for type 1.
    Compact,
}

impl std::str::FromStr for PeriodMenu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "divisors" => Ok(Self::Divisors),
            "compact" => Ok(Self::Compact),
            other => Err(Error::InvalidSpec(format!("unknown period menu {other:?}"))),
        }
    }
}

const DIVISOR_BASE_MS: u64 = 277_200;
const COMPACT_MS: [u64; 12] = [1, 2, 4, 5, 8, 10, 20, 25, 40, 50, 100, 200];
/// The jitter range `[500 us, 0.1 p]` is empty below 5 ms.
const MIN_PERIOD_MS: u64 = 5;

/// Candidate periods in milliseconds for a period type (upper bound `200 · type` ms).
pub fn period_menu(period_type: u8, menu: PeriodMenu) -> Result<Vec<u64>> {
    if !(1..=4).contains(&period_type) {
        return Err(Error::InvalidSpec(format!("period type {period_type} outside 1..=4")));
    }
    let upper = 200 * period_type as u64;
    let values: Vec<u64> = match menu {
        PeriodMenu::Divisors => (MIN_PERIOD_MS..=upper).filter(|p| DIVISOR_BASE_MS.is_multiple_of(*p)).collect(),
        PeriodMenu::Compact => {
            let extra: &[u64] = match period_type {
                1 => &[],
                2 => &[400],
                3 => &[300, 600],
                _ => &[400, 800],
            };
            COMPACT_MS.iter().chain(extra).copied().filter(|&p| p >= MIN_PERIOD_MS).collect()
        }
    };
    Ok(values)
}

/// Parameters of one synthetic case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub topology: TopologyKind,
    pub switches: u32,
    pub hosts_per_switch: u32,
    pub flows: usize,
    pub period_type: u8,
    pub seed: u64,
    pub multicast_ratio: f64,
    pub menu: PeriodMenu,
}

impl CaseSpec {
    pub fn new(topology: TopologyKind, flows: usize, period_type: u8, seed: u64) -> Self {
        Self {
            topology,
            switches: 8,
            hosts_per_switch: 2,
            flows,
            period_type,
            seed,
            multicast_ratio: 0.2,
            menu: PeriodMenu::default(),
        }
    }
}

/// A generated or loaded scheduling case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub slot: SlotConfig,
    pub topology: NetworkGraph,
    pub flows: Vec<Flow>,
}

/// Switch chain/ring/binary tree with `hosts_per_switch` hosts on every switch.
/// Switches take node ids `0..switches`; hosts follow.
pub fn build_topology(kind: TopologyKind, switches: u32, hosts_per_switch: u32) -> Result<NetworkGraph> {
    if switches == 0 || hosts_per_switch == 0 {
        return Err(Error::InvalidSpec("need at least one switch and one host per switch".into()));
    }
    if kind == TopologyKind::Ring && switches < 3 {
        return Err(Error::InvalidSpec("a ring needs at least three switches".into()));
    }
    let mut edges: Vec<(u32, u32)> = match kind {
        TopologyKind::Linear => (1..switches).map(|i| (i - 1, i)).collect(),
        TopologyKind::Ring => (0..switches).map(|i| (i, (i + 1) % switches)).collect(),
        TopologyKind::Tree => (1..switches).map(|i| ((i - 1) / 2, i)).collect(),
    };
    for s in 0..switches {
        for k in 0..hosts_per_switch {
            edges.push((switches + s * hosts_per_switch + k, s));
        }
    }
    let mut nodes: Vec<Node> = (0..switches).map(|i| Node { id: NodeId(i), kind: NodeKind::Switch }).collect();
    nodes.extend((0..switches * hosts_per_switch).map(|i| Node { id: NodeId(switches + i), kind: NodeKind::Host }));
    let mut links = Vec::with_capacity(edges.len() * 2);
    for (a, b) in edges {
        for (src, dst) in [(a, b), (b, a)] {
            links.push(Link { id: LinkId(links.len() as u32), src: NodeId(src), dst: NodeId(dst) });
        }
    }
    NetworkGraph::new(nodes, links)
}

struct Layout<'a> {
    network: &'a NetworkGraph,
    switches: u32,
    hosts_per_switch: u32,
    neighbors: Vec<Vec<u32>>,
}

impl Layout<'_> {
    fn switch_of(&self, host: u32) -> u32 {
        (host - self.switches) / self.hosts_per_switch
    }

    fn link(&self, a: u32, b: u32) -> LinkId {
        self.network.link_between(NodeId(a), NodeId(b)).expect("generated topology link")
    }

    /// BFS parents over switches, rooted at `root`.
    fn bfs(&self, root: u32) -> Vec<Option<u32>> {
        let mut parent = vec![None; self.switches as usize];
        let mut seen = vec![false; self.switches as usize];
        seen[root as usize] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbors[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    parent[v as usize] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    /// Switch sequence from the BFS root to `target`.
    fn switch_path(parent: &[Option<u32>], target: u32) -> Vec<u32> {
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = parent[cur as usize] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

const MAX_HOPS: usize = 6;

/// Deterministic case generation; attributes are uniform over their ranges.
pub fn generate_case(spec: &CaseSpec) -> Result<Case> {
    if !(0.0..=1.0).contains(&spec.multicast_ratio) {
        return Err(Error::InvalidSpec("multicast ratio outside [0, 1]".into()));
    }
    let periods = period_menu(spec.period_type, spec.menu)?;
    let network = build_topology(spec.topology, spec.switches, spec.hosts_per_switch)?;
    let slot = SlotConfig::default();
    let t = slot.slot_length_us;

    let mut neighbors = vec![Vec::new(); spec.switches as usize];
    for link in network.links() {
        let (a, b) = (link.src.0, link.dst.0);
        if a < spec.switches && b < spec.switches {
            neighbors[a as usize].push(b);
        }
    }
    neighbors.iter_mut().for_each(|n| n.sort_unstable());
    let layout = Layout { network: &network, switches: spec.switches, hosts_per_switch: spec.hosts_per_switch, neighbors };
    let host_count = (spec.switches * spec.hosts_per_switch) as u64;
    if host_count < 2 {
        return Err(Error::InvalidSpec("need at least two hosts".into()));
    }
    let bfs: Vec<Vec<Option<u32>>> = (0..spec.switches).map(|s| layout.bfs(s)).collect();
    let reachable = |src_sw: u32, dst_sw: u32| {
        let parent = &bfs[src_sw as usize];
        (src_sw == dst_sw || parent[dst_sw as usize].is_some())
            && Layout::switch_path(parent, dst_sw).len() <= MAX_HOPS
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut flows = Vec::with_capacity(spec.flows);
    for i in 0..spec.flows {
        let multicast = rng.gen_bool(spec.multicast_ratio);
        let destinations = if multicast { rng.gen_range(2u32..=3) } else { 1 };
        let src = spec.switches + rng.gen_range(0..host_count) as u32;
        let src_sw = layout.switch_of(src);
        let mut dsts = BTreeSet::new();
        let mut attempts = 0;
        while dsts.len() < destinations as usize {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::InvalidSpec("cannot find destinations within 6 hops".into()));
            }
            let d = spec.switches + rng.gen_range(0..host_count) as u32;
            if d != src && reachable(src_sw, layout.switch_of(d)) {
                dsts.insert(d);
            }
        }
        let route = build_route(&layout, &bfs[src_sw as usize], src, &dsts);

        let period_ms = periods[rng.gen_range(0..periods.len() as u64) as usize];
        let period_us = period_ms * 1000;
        let hop_count = dsts
            .iter()
            .map(|&d| Layout::switch_path(&bfs[src_sw as usize], layout.switch_of(d)).len() as u64)
            .max()
            .unwrap_or(1);
        let frame_length_bytes = rng.gen_range(64u32..=1500);
        let basetime_us = rng.gen_range(0..period_us);
        let latency_lo = (period_us / 10).max((hop_count + 1) * t);
        let max_latency_us = rng.gen_range(latency_lo..=period_us / 2);
        let max_jitter_us = rng.gen_range(500..=period_us / 10);
        flows.push(Flow {
            id: FlowId(i as u32),
            frame_length_bytes,
            period_us,
            basetime_us,
            max_latency_us,
            max_jitter_us,
            route,
        });
    }
    Ok(Case { slot, topology: network, flows })
}

fn build_route(layout: &Layout<'_>, parent: &[Option<u32>], src: u32, dsts: &BTreeSet<u32>) -> Route {
    let src_sw = layout.switch_of(src);
    if dsts.len() == 1 {
        let dst = *dsts.iter().next().expect("one destination");
        let switches = Layout::switch_path(parent, layout.switch_of(dst));
        let mut links = vec![layout.link(src, src_sw)];
        links.extend(switches.windows(2).map(|w| layout.link(w[0], w[1])));
        links.push(layout.link(layout.switch_of(dst), dst));
        return Route::Path(links);
    }
    // Union of BFS-tree paths is itself a tree; keyed by link to drop shared prefixes.
    let root = layout.link(src, src_sw);
    let mut edges: BTreeMap<LinkId, Option<LinkId>> = BTreeMap::from([(root, None)]);
    for &dst in dsts {
        let switches = Layout::switch_path(parent, layout.switch_of(dst));
        let mut up = root;
        for w in switches.windows(2) {
            let l = layout.link(w[0], w[1]);
            edges.insert(l, Some(up));
            up = l;
        }
        edges.insert(layout.link(layout.switch_of(dst), dst), Some(up));
    }
    Route::Tree(edges.into_iter().map(|(link, parent)| TreeLink { link, parent }).collect())
}
