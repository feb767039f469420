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

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{FlowId, LinkId, NetworkGraph, SlotConfig};
use crate::error::{Error, Result};
use crate::hypergraph::FeatureTuple;

/// A periodic time-sensitive stream as written in a case file (microseconds, bytes).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flow {
    pub id: FlowId,
    pub frame_length_bytes: u32,
    pub period_us: u64,
    pub basetime_us: u64,
    pub max_latency_us: u64,
    pub max_jitter_us: u64,
    pub route: Route,
}

/// Unicast path or multicast link tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Path(Vec<LinkId>),
    Tree(Vec<TreeLink>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeLink {
    pub link: LinkId,
    /// Upstream link; `None` for the root leaving the source host.
    pub parent: Option<LinkId>,
}

/// A route link together with the number of hops traversed before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteHop {
    pub link: LinkId,
    pub depth: u64,
}

impl Route {
    /// Checks the route against the network and returns its hops in route order.
    pub fn resolve(&self, flow: FlowId, network: &NetworkGraph) -> Result<Vec<RouteHop>> {
        let invalid = |reason: String| Error::InvalidRoute { flow, reason };
        let lookup = |id: LinkId| network.link(id).ok_or_else(|| invalid(format!("unknown link {id}")));
        match self {
            Route::Path(links) => {
                if links.is_empty() {
                    return Err(invalid("empty path".into()));
                }
                let mut seen = BTreeSet::new();
                let mut hops = Vec::with_capacity(links.len());
                let mut prev: Option<&super::Link> = None;
                for (depth, &id) in links.iter().enumerate() {
                    let link = lookup(id)?;
                    if !seen.insert(id) {
                        return Err(invalid(format!("link {id} repeated")));
                    }
                    match prev {
                        None if !network.is_host(link.src) => {
                            return Err(invalid(format!("path starts at non-host node {}", link.src)))
                        }
                        Some(p) if p.dst != link.src => {
                            return Err(invalid(format!("links {} and {id} are not adjacent", p.id)))
                        }
                        _ => {}
                    }
                    hops.push(RouteHop { link: id, depth: depth as u64 });
                    prev = Some(link);
                }
                let last = prev.expect("non-empty path");
                if !network.is_host(last.dst) {
                    return Err(invalid(format!("path ends at non-host node {}", last.dst)));
                }
                Ok(hops)
            }
            Route::Tree(edges) => {
                if edges.is_empty() {
                    return Err(invalid("empty tree".into()));
                }
                let mut parent_of = BTreeMap::new();
                for e in edges {
                    lookup(e.link)?;
                    if parent_of.insert(e.link, e.parent).is_some() {
                        return Err(invalid(format!("link {} repeated", e.link)));
                    }
                }
                let roots: Vec<_> = edges.iter().filter(|e| e.parent.is_none()).collect();
                if roots.len() != 1 {
                    return Err(invalid(format!("tree must have one root, found {}", roots.len())));
                }
                let root = lookup(roots[0].link)?;
                if !network.is_host(root.src) {
                    return Err(invalid(format!("tree root leaves non-host node {}", root.src)));
                }
                let mut has_child = BTreeSet::new();
                let mut hops = Vec::with_capacity(edges.len());
                for e in edges {
                    let link = lookup(e.link)?;
                    if let Some(p) = e.parent {
                        let parent = parent_of
                            .get(&p)
                            .map(|_| lookup(p))
                            .ok_or_else(|| invalid(format!("parent {p} of {} not in tree", e.link)))??;
                        if parent.dst != link.src {
                            return Err(invalid(format!("links {p} and {} are not adjacent", e.link)));
                        }
                        has_child.insert(p);
                    }
                    // Depth by walking to the root; more steps than edges means a cycle.
                    let mut depth = 0u64;
                    let mut cursor = e.parent;
                    while let Some(p) = cursor {
                        depth += 1;
                        if depth as usize > edges.len() {
                            return Err(invalid("tree contains a cycle".into()));
                        }
                        cursor = parent_of[&p];
                    }
                    hops.push(RouteHop { link: e.link, depth });
                }
                for e in edges {
                    let link = lookup(e.link)?;
                    if !has_child.contains(&e.link) && !network.is_host(link.dst) {
                        return Err(invalid(format!("leaf link {} ends at non-host node", e.link)));
                    }
                }
                Ok(hops)
            }
        }
    }
}

/// A flow with every attribute expressed in whole slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotFlow {
    pub id: FlowId,
    /// Frame length in bytes.
    pub length: u64,
    pub period: u64,
    pub basetime: u64,
    pub deadline: u64,
    pub jitter: u64,
    pub hops: Vec<RouteHop>,
    /// Maximum hop depth over all destinations.
    pub hop_count: u64,
}

impl SlotFlow {
    pub fn new(
        id: FlowId,
        length: u64,
        period: u64,
        basetime: u64,
        deadline: u64,
        jitter: u64,
        hops: Vec<RouteHop>,
    ) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidFlow(format!("flow {id}: zero frame length")));
        }
        if period == 0 {
            return Err(Error::InvalidFlow(format!("flow {id}: zero period")));
        }
        if hops.is_empty() {
            return Err(Error::InvalidFlow(format!("flow {id}: empty route")));
        }
        let links: BTreeSet<_> = hops.iter().map(|h| h.link).collect();
        if links.len() != hops.len() {
            return Err(Error::InvalidFlow(format!("flow {id}: link used twice on route")));
        }
        let hop_count = hops.iter().map(|h| h.depth).max().unwrap_or(0);
        if deadline <= hop_count {
            return Err(Error::Unschedulable {
                flow: id,
                reason: format!("latency bound of {deadline} slots leaves no offset for {hop_count} hops"),
            });
        }
        if jitter < 2 {
            return Err(Error::Unschedulable {
                flow: id,
                reason: format!("jitter bound of {jitter} slots is below the 2-slot CQF jitter"),
            });
        }
        Ok(Self {
            id,
            length,
            period,
            basetime: basetime % period,
            deadline,
            jitter,
            hops,
            hop_count,
        })
    }

    /// Exclusive upper bound of the offset search.
    pub fn offset_bound(&self) -> u64 {
        self.period.min(self.deadline - self.hop_count)
    }

    pub fn hop(&self, link: LinkId) -> Option<&RouteHop> {
        self.hops.iter().find(|h| h.link == link)
    }

    /// Baseline forwarding slot on `link` under `offset`.
    pub fn forwarding_base(&self, offset: u64, link: LinkId) -> Result<u64> {
        let hop = self.hop(link).ok_or(Error::LinkNotOnRoute { flow: self.id, link })?;
        Ok(self.basetime + offset + hop.depth)
    }

    pub fn tuple_at(&self, hop: &RouteHop, offset: u64) -> FeatureTuple {
        FeatureTuple::new(self.basetime + offset + hop.depth, self.period)
    }

    /// `(o + h + 1)` slots, the worst-case latency in slot units.
    pub fn worst_case_slots(&self, offset: u64) -> u64 {
        offset + self.hop_count + 1
    }
}

/// Converts a case-file flow to slot units and checks its schedulability preconditions.
pub fn to_slot_domain(flow: &Flow, network: &NetworkGraph, config: &SlotConfig) -> Result<SlotFlow> {
    let t = config.slot_length_us;
    if t == 0 {
        return Err(Error::InvalidConfig("slot length must be positive".into()));
    }
    if !(64..=1500).contains(&flow.frame_length_bytes) {
        return Err(Error::InvalidFlow(format!(
            "flow {}: frame length {} outside [64, 1500] bytes",
            flow.id, flow.frame_length_bytes
        )));
    }
    if flow.period_us == 0 || !flow.period_us.is_multiple_of(t) {
        return Err(Error::PeriodNotDivisible { flow: flow.id, period_us: flow.period_us, slot_us: t });
    }
    if flow.basetime_us >= flow.period_us {
        return Err(Error::InvalidFlow(format!(
            "flow {}: basetime {} us not below period {} us",
            flow.id, flow.basetime_us, flow.period_us
        )));
    }
    let hops = flow.route.resolve(flow.id, network)?;
    SlotFlow::new(
        flow.id,
        flow.frame_length_bytes as u64,
        flow.period_us / t,
        flow.basetime_us / t,
        flow.max_latency_us / t,
        flow.max_jitter_us / t,
        hops,
    )
}

pub fn worst_case_latency_us(offset: u64, hop_count: u64, slot_length_us: u64) -> u64 {
    (offset + hop_count + 1) * slot_length_us
}

/// A constraint violation found by [`check_constraints`] or the oracle validator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Latency { flow: FlowId, offset: u64, bound: u64 },
    Jitter { flow: FlowId, deviation: u64, allowed: u64 },
    Capacity { link: LinkId, slot: u64, occupancy: u64, capacity: u64 },
}

/// Latency and jitter checks for one flow. `subflow_offsets` lists the offsets of
/// its re-scheduled portions (empty when the flow is undecomposed).
pub fn check_constraints(flow: &SlotFlow, offset: u64, subflow_offsets: &[u64]) -> Vec<Violation> {
    let bound = flow.deadline - flow.hop_count;
    let mut out = Vec::new();
    for &o in std::iter::once(&offset).chain(subflow_offsets) {
        if o >= bound {
            out.push(Violation::Latency { flow: flow.id, offset: o, bound });
        }
    }
    let deviation = subflow_offsets.iter().map(|&o| o.abs_diff(offset)).max().unwrap_or(0);
    if deviation + 2 > flow.jitter {
        out.push(Violation::Jitter {
            flow: flow.id,
            deviation,
            allowed: flow.jitter.saturating_sub(2),
        });
    }
    out
}

/// Slot-domain flows plus the slot configuration they were converted under.
#[derive(Clone, Debug)]
pub struct Instance {
    pub config: SlotConfig,
    flows: Vec<SlotFlow>,
    by_id: HashMap<FlowId, usize>,
}

impl Instance {
    pub fn new(config: SlotConfig, mut flows: Vec<SlotFlow>) -> Result<Self> {
        config.validate()?;
        flows.sort_by_key(|f| f.id);
        let mut by_id = HashMap::with_capacity(flows.len());
        for (i, f) in flows.iter().enumerate() {
            if by_id.insert(f.id, i).is_some() {
                return Err(Error::InvalidFlow(format!("duplicate flow id {}", f.id)));
            }
        }
        Ok(Self { config, flows, by_id })
    }

    /// Converts every flow; the slot length must divide every period.
    pub fn ingest(network: &NetworkGraph, flows: &[Flow], config: SlotConfig) -> Result<Self> {
        let slot_flows = flows
            .iter()
            .map(|f| to_slot_domain(f, network, &config))
            .collect::<Result<Vec<_>>>()?;
        Self::new(config, slot_flows)
    }

    pub fn flows(&self) -> &[SlotFlow] {
        &self.flows
    }

    pub fn flow(&self, id: FlowId) -> Option<&SlotFlow> {
        self.by_id.get(&id).map(|&i| &self.flows[i])
    }

    pub fn capacity(&self) -> Result<u64> {
        self.config.capacity()
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Link, Node, NodeId, NodeKind};

    fn chain(hops: u64) -> Vec<RouteHop> {
        (0..hops).map(|d| RouteHop { link: LinkId(d as u32), depth: d }).collect()
    }

    /// host0 -> sw1 -> sw2 -> host3, plus sw2 -> host4 for multicast.
    fn small_net() -> NetworkGraph {
        let n = |id, kind| Node { id: NodeId(id), kind };
        let l = |id, s, d| Link { id: LinkId(id), src: NodeId(s), dst: NodeId(d) };
        NetworkGraph::new(
            vec![
                n(0, NodeKind::Host),
                n(1, NodeKind::Switch),
                n(2, NodeKind::Switch),
                n(3, NodeKind::Host),
                n(4, NodeKind::Host),
            ],
            vec![l(0, 0, 1), l(1, 1, 2), l(2, 2, 3), l(3, 2, 4), l(4, 1, 0)],
        )
        .unwrap()
    }

    fn flow(period_us: u64, latency_us: u64, route: Route) -> Flow {
        Flow {
            id: FlowId(1),
            frame_length_bytes: 100,
            period_us,
            basetime_us: 300,
            max_latency_us: latency_us,
            max_jitter_us: 500,
            route,
        }
    }

    #[test]
    fn slot_conversion() {
        let net = small_net();
        let cfg = SlotConfig::default();
        let f = to_slot_domain(&flow(1000, 1000, Route::Path(vec![LinkId(0), LinkId(1), LinkId(2)])), &net, &cfg)
            .unwrap();
        assert_eq!((f.period, f.basetime, f.deadline, f.jitter, f.hop_count), (8, 2, 8, 4, 2));
    }

    #[test]
    fn period_must_be_slot_multiple() {
        let net = small_net();
        let err = to_slot_domain(&flow(1100, 1000, Route::Path(vec![LinkId(0), LinkId(1), LinkId(2)])), &net, &SlotConfig::default());
        assert!(matches!(err, Err(Error::PeriodNotDivisible { .. })));
    }

    #[test]
    fn deadline_must_exceed_hop_count() {
        // d = 500 us -> 4 slots against 5 hops.
        let err = SlotFlow::new(FlowId(0), 100, 8, 0, 500 / 125, 4, chain(6));
        assert!(matches!(err, Err(Error::Unschedulable { .. })));
        assert!(matches!(SlotFlow::new(FlowId(0), 100, 8, 0, 8, 1, chain(2)), Err(Error::Unschedulable { .. })));
    }

    #[test]
    fn forwarding_base_uses_hops_before_link() {
        let f = SlotFlow::new(FlowId(0), 100, 8, 2, 8, 4, chain(3)).unwrap();
        assert_eq!(f.forwarding_base(1, LinkId(0)).unwrap(), 3);
        assert_eq!(f.forwarding_base(1, LinkId(2)).unwrap(), 5);
        assert!(matches!(f.forwarding_base(1, LinkId(9)), Err(Error::LinkNotOnRoute { .. })));
    }

    #[test]
    fn multicast_depths_follow_tree() {
        let net = small_net();
        let tree = Route::Tree(vec![
            TreeLink { link: LinkId(3), parent: Some(LinkId(1)) },
            TreeLink { link: LinkId(0), parent: None },
            TreeLink { link: LinkId(1), parent: Some(LinkId(0)) },
            TreeLink { link: LinkId(2), parent: Some(LinkId(1)) },
        ]);
        let f = to_slot_domain(&flow(1000, 2000, tree), &net, &SlotConfig::default()).unwrap();
        assert_eq!(f.hop(LinkId(3)).unwrap().depth, 2);
        assert_eq!(f.hop(LinkId(2)).unwrap().depth, 2);
        assert_eq!(f.hop_count, 2);
        assert_eq!(f.forwarding_base(1, LinkId(3)).unwrap(), 2 + 1 + 2);
    }

    #[test]
    fn rejects_broken_routes() {
        let net = small_net();
        let cfg = SlotConfig::default();
        // Not adjacent.
        assert!(to_slot_domain(&flow(1000, 2000, Route::Path(vec![LinkId(0), LinkId(2)])), &net, &cfg).is_err());
        // Ends at a switch.
        assert!(to_slot_domain(&flow(1000, 2000, Route::Path(vec![LinkId(0), LinkId(1)])), &net, &cfg).is_err());
        // Tree whose leaf stops at a switch.
        let tree = Route::Tree(vec![TreeLink { link: LinkId(0), parent: None }, TreeLink { link: LinkId(1), parent: Some(LinkId(0)) }]);
        assert!(to_slot_domain(&flow(1000, 2000, tree), &net, &cfg).is_err());
    }

    #[test]
    fn worst_case_latency() {
        assert_eq!(worst_case_latency_us(0, 3, 125), 500);
        assert_eq!(worst_case_latency_us(2, 5, 125), 1000);
    }

    #[test]
    fn constraint_boundaries() {
        let f = SlotFlow::new(FlowId(0), 100, 16, 0, 10, 3, chain(5)).unwrap();
        assert_eq!(f.hop_count, 4);
        assert!(check_constraints(&f, 5, &[]).is_empty());
        assert!(matches!(check_constraints(&f, 6, &[])[..], [Violation::Latency { .. }]));
        // j = 3, deviation 1: 1 + 2 <= 3.
        assert!(check_constraints(&f, 2, &[3]).is_empty());
        assert!(matches!(check_constraints(&f, 2, &[4])[..], [Violation::Jitter { .. }]));
    }
}
