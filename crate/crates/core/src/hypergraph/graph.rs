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

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{degeneracy_order, maximal_cliques, FeatureTuple};
use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::model::{FlowId, LinkId};

/// Flows aggregated under one feature tuple on one link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperFlowNode {
    pub tuple: FeatureTuple,
    /// Sum of member frame lengths, bytes.
    pub weight: u64,
    /// Member flows, ascending; a flow appears once per portion it contributes.
    pub members: Vec<FlowId>,
}

#[derive(Clone, Debug)]
struct Clique {
    members: Vec<usize>,
    weight: u64,
}

/// Canonical view of a link's maximal cliques: sorted tuple lists and their combined weights.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSet {
    pub cliques: BTreeMap<Vec<FeatureTuple>, u64>,
}

impl CliqueSet {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn max_weight(&self) -> u64 {
        self.cliques.values().copied().max().unwrap_or(0)
    }
}

/// JSON-friendly dump of a link graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDump {
    pub link: LinkId,
    pub nodes: Vec<HyperFlowNode>,
    pub edges: Vec<(usize, usize)>,
    pub cliques: Vec<DumpedClique>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpedClique {
    pub nodes: Vec<usize>,
    pub weight: u64,
}

/// Hyper-flow graph of one link with incrementally maintained maximal cliques.
///
/// With `merge_identical` off the graph degenerates to the plain flow graph:
/// every insertion becomes its own node even when its tuple already exists.
#[derive(Clone, Debug)]
pub struct LinkGraph {
    link: LinkId,
    merge_identical: bool,
    nodes: Vec<HyperFlowNode>,
    /// period → q → node indices; more than one index only in flow-graph mode.
    by_period: BTreeMap<u64, BTreeMap<u64, Vec<usize>>>,
    neighbors: Vec<Vec<usize>>,
    cliques: Vec<Option<Clique>>,
    free: Vec<usize>,
    node_cliques: Vec<Vec<usize>>,
}

impl LinkGraph {
    pub fn new(link: LinkId) -> Self {
        Self {
            link,
            merge_identical: true,
            nodes: Vec::new(),
            by_period: BTreeMap::new(),
            neighbors: Vec::new(),
            cliques: Vec::new(),
            free: Vec::new(),
            node_cliques: Vec::new(),
        }
    }

    /// One node per flow; identical tuples are kept apart.
    pub fn new_flow_graph(link: LinkId) -> Self {
        Self { merge_identical: false, ..Self::new(link) }
    }

    /// Builds the graph from scratch and enumerates its cliques in one batch.
    pub fn from_nodes(link: LinkId, nodes: Vec<HyperFlowNode>) -> Result<Self> {
        let mut graph = Self::new(link);
        for node in nodes {
            if node.weight == 0 {
                return Err(Error::InvalidFlow(format!("zero-weight node {:?}", node.tuple)));
            }
            if graph.find(node.tuple).is_some() {
                return Err(Error::DuplicateTuple { link, q: node.tuple.q, period: node.tuple.period });
            }
            let kappa = graph.neighbors_of(node.tuple);
            graph.attach(node, kappa);
        }
        graph.rebuild_cliques();
        Ok(graph)
    }

    pub fn link(&self) -> LinkId {
        self.link
    }

    pub fn is_flow_graph(&self) -> bool {
        !self.merge_identical
    }

    pub fn nodes(&self) -> &[HyperFlowNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn node(&self, tuple: FeatureTuple) -> Option<&HyperFlowNode> {
        self.find(tuple).map(|i| &self.nodes[i])
    }

    pub fn contains(&self, tuple: FeatureTuple) -> bool {
        self.merge_identical && self.find(tuple).is_some()
    }

    pub fn clique_count(&self) -> usize {
        self.cliques.len() - self.free.len()
    }

    fn live_cliques(&self) -> impl Iterator<Item = &Clique> {
        self.cliques.iter().flatten()
    }

    /// Node indices of every maximal clique with its combined weight.
    pub fn cliques(&self) -> impl Iterator<Item = (&[usize], u64)> {
        self.live_cliques().map(|c| (c.members.as_slice(), c.weight))
    }

    pub fn clique_set(&self) -> CliqueSet {
        let cliques = self
            .live_cliques()
            .map(|c| {
                let mut tuples: Vec<_> = c.members.iter().map(|&i| self.nodes[i].tuple).collect();
                tuples.sort_unstable();
                (tuples, c.weight)
            })
            .collect();
        CliqueSet { cliques }
    }

    pub fn max_clique_weight(&self) -> u64 {
        self.live_cliques().map(|c| c.weight).max().unwrap_or(0)
    }

    fn find(&self, tuple: FeatureTuple) -> Option<usize> {
        self.by_period.get(&tuple.period)?.get(&tuple.q)?.first().copied()
    }

    /// Existing nodes adjacent to `tuple`, ascending. A node carrying `tuple` itself is
    /// included only in flow-graph mode.
    pub fn neighbors_of(&self, tuple: FeatureTuple) -> Vec<usize> {
        let mut out = Vec::new();
        self.neighbors_into(tuple, &mut out);
        out.sort_unstable();
        out
    }

    /// Unordered variant of [`neighbors_of`](Self::neighbors_of) appending to `out`.
    fn neighbors_into(&self, tuple: FeatureTuple, out: &mut Vec<usize>) {
        for (&period, by_q) in &self.by_period {
            let g = gcd(period, tuple.period);
            let residue = tuple.q % g;
            let skip_self = self.merge_identical && period == tuple.period;
            let mut take = |q: u64, members: &Vec<usize>| {
                if !(skip_self && q == tuple.q) {
                    out.extend_from_slice(members);
                }
            };
            if g == period {
                if let Some(members) = by_q.get(&residue) {
                    take(residue, members);
                }
            } else if g == 1 {
                by_q.iter().for_each(|(&q, m)| take(q, m));
            } else if ((period / g) as usize) < by_q.len() {
                for q in (residue..period).step_by(g as usize) {
                    if let Some(members) = by_q.get(&q) {
                        take(q, members);
                    }
                }
            } else {
                by_q.iter().filter(|&(&q, _)| q % g == residue).for_each(|(&q, m)| take(q, m));
            }
        }
    }

    /// `(clique id, Σ weight of its members inside `kappa`, member count inside `kappa`)`
    /// for every clique touching `kappa`, ascending by clique id.
    fn clique_intersections(&self, kappa: &[usize]) -> Vec<(usize, u64, usize)> {
        let mut acc = vec![(0u64, 0usize); self.cliques.len()];
        let mut touched = Vec::new();
        for &v in kappa {
            let w = self.nodes[v].weight;
            for &c in &self.node_cliques[v] {
                if acc[c].1 == 0 {
                    touched.push(c);
                }
                acc[c].0 += w;
                acc[c].1 += 1;
            }
        }
        touched.sort_unstable();
        touched.into_iter().map(|c| (c, acc[c].0, acc[c].1)).collect()
    }

    /// Heaviest slot that would contain `extra` bytes added under `tuple`, without
    /// mutating the graph. Existing tuple: the heaviest clique through its node. New
    /// tuple: the heaviest candidate clique `(ϖ ∩ κ) ∪ {φ}`.
    pub fn peak_with(&self, tuple: FeatureTuple, extra: u64) -> u64 {
        if let Some(idx) = self.find(tuple).filter(|_| self.merge_identical) {
            let best = self.node_cliques[idx]
                .iter()
                .map(|&c| self.cliques[c].as_ref().expect("live clique").weight)
                .max()
                .unwrap_or(0);
            return best + extra;
        }
        let mut kappa = Vec::new();
        self.neighbors_into(tuple, &mut kappa);
        let mut acc = vec![0u64; self.cliques.len()];
        let mut best = 0;
        for v in kappa {
            let w = self.nodes[v].weight;
            for &c in &self.node_cliques[v] {
                acc[c] += w;
                best = best.max(acc[c]);
            }
        }
        best + extra
    }

    /// Raw candidate set of a not-yet-inserted tuple as node-index lists; the new node is
    /// represented by `usize::MAX`. Returns `{{φ}}` when no clique meets the neighbors.
    pub fn candidates_for(&self, tuple: FeatureTuple) -> Vec<Vec<usize>> {
        let kappa = self.neighbors_of(tuple);
        let mut in_kappa = vec![false; self.nodes.len()];
        kappa.iter().for_each(|&v| in_kappa[v] = true);
        let mut out: Vec<Vec<usize>> = self
            .clique_intersections(&kappa)
            .into_iter()
            .map(|(c, _, _)| {
                let mut m: Vec<usize> = self.cliques[c]
                    .as_ref()
                    .expect("live clique")
                    .members
                    .iter()
                    .copied()
                    .filter(|&v| in_kappa[v])
                    .collect();
                m.push(usize::MAX);
                m
            })
            .collect();
        if out.is_empty() {
            out.push(vec![usize::MAX]);
        }
        out.sort();
        out.dedup();
        out
    }

    /// Adds a node for an absent tuple and updates the maximal cliques incrementally.
    /// Returns the node index.
    pub fn insert_node(&mut self, tuple: FeatureTuple, weight: u64, members: Vec<FlowId>) -> Result<usize> {
        if self.contains(tuple) {
            return Err(Error::DuplicateTuple { link: self.link, q: tuple.q, period: tuple.period });
        }
        if weight == 0 {
            return Err(Error::InvalidFlow(format!("zero-weight node {tuple:?}")));
        }
        let kappa = self.neighbors_of(tuple);
        let mut in_kappa = vec![false; self.nodes.len()];
        kappa.iter().for_each(|&v| in_kappa[v] = true);

        let mut full: Vec<Vec<usize>> = Vec::new();
        let mut partial: Vec<Vec<usize>> = Vec::new();
        let mut subsumed = Vec::new();
        for (c, _, count) in self.clique_intersections(&kappa) {
            let clique = self.cliques[c].as_ref().expect("live clique");
            if count == clique.members.len() {
                // ϖ ⊆ κ: ϖ ∪ {φ} replaces it and is maximal.
                full.push(clique.members.clone());
                subsumed.push(c);
            } else {
                partial.push(clique.members.iter().copied().filter(|&v| in_kappa[v]).collect());
            }
        }
        for c in subsumed {
            self.remove_clique(c);
        }
        // A partial candidate survives only if no other candidate contains it.
        partial.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        partial.dedup();
        let mut kept: Vec<Vec<usize>> = full;
        let full_len = kept.len();
        for cand in partial {
            if !kept.iter().any(|k| k.len() >= cand.len() && is_subset(&cand, k)) {
                kept.push(cand);
            }
        }
        debug_assert!(kept[..full_len].iter().all(|k| !k.is_empty()));
        if kept.is_empty() {
            kept.push(Vec::new());
        }

        let idx = self.attach(HyperFlowNode { tuple, weight, members }, kappa);
        for mut members in kept {
            members.push(idx);
            self.add_clique(members);
        }
        Ok(idx)
    }

    /// Adds `delta` bytes from `flow` to an existing node (and every clique through it).
    pub fn add_weight(&mut self, tuple: FeatureTuple, delta: u64, flow: FlowId) -> Result<()> {
        let idx = self.lookup(tuple)?;
        let node = &mut self.nodes[idx];
        node.weight += delta;
        let pos = node.members.partition_point(|&m| m <= flow);
        node.members.insert(pos, flow);
        for &c in &self.node_cliques[idx] {
            self.cliques[c].as_mut().expect("live clique").weight += delta;
        }
        Ok(())
    }

    /// Inverse of [`add_weight`](Self::add_weight). The node itself is kept.
    pub fn remove_weight(&mut self, tuple: FeatureTuple, delta: u64, flow: FlowId) -> Result<()> {
        let idx = self.lookup(tuple)?;
        let node = &mut self.nodes[idx];
        let pos = node
            .members
            .binary_search(&flow)
            .map_err(|_| Error::InvalidFlow(format!("flow {flow} is not a member of {tuple:?}")))?;
        if delta >= node.weight {
            return Err(Error::InvalidFlow(format!("removing {delta} bytes would empty {tuple:?}")));
        }
        node.members.remove(pos);
        node.weight -= delta;
        for &c in &self.node_cliques[idx] {
            self.cliques[c].as_mut().expect("live clique").weight -= delta;
        }
        Ok(())
    }

    /// Commits `weight` bytes of `flow` under `tuple`: merges into the existing node or
    /// inserts a new one.
    pub fn commit(&mut self, tuple: FeatureTuple, weight: u64, flow: FlowId) -> Result<()> {
        if self.contains(tuple) {
            self.add_weight(tuple, weight, flow)
        } else {
            self.insert_node(tuple, weight, vec![flow]).map(|_| ())
        }
    }

    /// Replaces the clique set with a batch Bron–Kerbosch enumeration.
    pub fn rebuild_cliques(&mut self) {
        self.cliques.clear();
        self.free.clear();
        self.node_cliques.iter_mut().for_each(Vec::clear);
        for members in maximal_cliques(&self.adjacency()) {
            self.add_clique(members);
        }
    }

    pub fn adjacency(&self) -> Vec<FixedBitSet> {
        let n = self.nodes.len();
        self.neighbors
            .iter()
            .map(|ns| {
                let mut b = FixedBitSet::with_capacity(n);
                ns.iter().for_each(|&v| b.insert(v));
                b
            })
            .collect()
    }

    /// Degeneracy of the current graph; bounds the work of clique enumeration.
    pub fn degeneracy(&self) -> usize {
        degeneracy_order(&self.adjacency()).1
    }

    pub fn dump(&self) -> GraphDump {
        let mut edges = Vec::new();
        for (a, ns) in self.neighbors.iter().enumerate() {
            edges.extend(ns.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        let mut cliques: Vec<_> = self
            .live_cliques()
            .map(|c| DumpedClique { nodes: c.members.clone(), weight: c.weight })
            .collect();
        cliques.sort_by(|a, b| a.nodes.cmp(&b.nodes));
        GraphDump { link: self.link, nodes: self.nodes.clone(), edges, cliques }
    }

    fn lookup(&self, tuple: FeatureTuple) -> Result<usize> {
        self.find(tuple)
            .filter(|_| self.merge_identical)
            .ok_or(Error::UnknownTuple { link: self.link, q: tuple.q, period: tuple.period })
    }

    fn attach(&mut self, node: HyperFlowNode, kappa: Vec<usize>) -> usize {
        let idx = self.nodes.len();
        for &v in &kappa {
            self.neighbors[v].push(idx);
        }
        self.neighbors.push(kappa);
        self.by_period.entry(node.tuple.period).or_default().entry(node.tuple.q).or_default().push(idx);
        self.nodes.push(node);
        self.node_cliques.push(Vec::new());
        idx
    }

    fn add_clique(&mut self, members: Vec<usize>) {
        let weight = members.iter().map(|&v| self.nodes[v].weight).sum();
        let id = match self.free.pop() {
            Some(id) => id,
            None => {
                self.cliques.push(None);
                self.cliques.len() - 1
            }
        };
        for &v in &members {
            self.node_cliques[v].push(id);
        }
        self.cliques[id] = Some(Clique { members, weight });
    }

    fn remove_clique(&mut self, id: usize) {
        let clique = self.cliques[id].take().expect("live clique");
        for v in clique.members {
            let list = &mut self.node_cliques[v];
            let pos = list.iter().position(|&c| c == id).expect("clique registered on member");
            list.swap_remove(pos);
        }
        self.free.push(id);
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|s| it.by_ref().any(|b| b == s))
}

/// Merges per-partition graphs of one link: equal tuples are fused with summed weights and
/// unioned members, edges are recomputed and cliques enumerated in batch.
pub fn merge_graphs<'a, I>(link: LinkId, graphs: I) -> Result<LinkGraph>
where
    I: IntoIterator<Item = &'a LinkGraph>,
{
    let mut merged: BTreeMap<FeatureTuple, HyperFlowNode> = BTreeMap::new();
    for g in graphs {
        if g.link != link {
            return Err(Error::InvalidNetwork(format!("merging graph of link {} into link {link}", g.link)));
        }
        for node in &g.nodes {
            let entry = merged.entry(node.tuple).or_insert_with(|| HyperFlowNode {
                tuple: node.tuple,
                weight: 0,
                members: Vec::new(),
            });
            entry.weight += node.weight;
            entry.members.extend_from_slice(&node.members);
        }
    }
    let nodes = merged
        .into_values()
        .map(|mut n| {
            n.members.sort_unstable();
            n
        })
        .collect();
    LinkGraph::from_nodes(link, nodes)
}

/// Candidate cliques for a node `new` joining with neighbors `kappa`:
/// `{(ϖ ∩ κ) ∪ {new} : ϖ ∩ κ ≠ ∅}`, or `{{new}}` when no clique meets `kappa`.
pub fn candidate_cliques<T: Ord + Clone>(
    cliques: &[BTreeSet<T>],
    kappa: &BTreeSet<T>,
    new: T,
) -> BTreeSet<BTreeSet<T>> {
    let mut out: BTreeSet<BTreeSet<T>> = cliques
        .iter()
        .map(|c| c.intersection(kappa).cloned().collect::<BTreeSet<T>>())
        .filter(|s| !s.is_empty())
        .map(|mut s| {
            s.insert(new.clone());
            s
        })
        .collect();
    if out.is_empty() {
        out.insert(BTreeSet::from([new]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::bron_kerbosch::tests::naive_maximal_cliques;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(q: u64, p: u64) -> FeatureTuple {
        FeatureTuple::new(q, p)
    }

    fn set<T: Ord + Clone>(items: &[T]) -> BTreeSet<T> {
        items.iter().cloned().collect()
    }

    #[test]
    fn candidate_examples() {
        let ab = set(&['A', 'B']);
        let bc = set(&['B', 'C']);
        assert_eq!(
            candidate_cliques(std::slice::from_ref(&ab), &set(&['A']), 'P'),
            BTreeSet::from([set(&['A', 'P'])])
        );
        assert_eq!(
            candidate_cliques(&[ab.clone(), bc.clone()], &BTreeSet::new(), 'P'),
            BTreeSet::from([set(&['P'])])
        );
        assert_eq!(
            candidate_cliques(&[ab, bc], &set(&['A', 'B', 'C']), 'P'),
            BTreeSet::from([set(&['A', 'B', 'P']), set(&['B', 'C', 'P'])])
        );
    }

    #[test]
    fn insert_into_empty_graph() {
        let mut g = LinkGraph::new(LinkId(0));
        g.insert_node(t(0, 4), 10, vec![FlowId(0)]).unwrap();
        assert_eq!(g.clique_set().cliques, BTreeMap::from([(vec![t(0, 4)], 10)]));
        assert!(matches!(g.insert_node(t(4, 4), 1, vec![]), Err(Error::DuplicateTuple { .. })));
    }

    #[test]
    fn insert_adjacent_to_both_ends_of_an_edge() {
        // A=(0,2) and B=(0,4) are adjacent, C=(2,4) adjacent to A only.
        let mut g = LinkGraph::new(LinkId(0));
        g.insert_node(t(0, 2), 1, vec![]).unwrap();
        g.insert_node(t(0, 4), 2, vec![]).unwrap();
        assert_eq!(g.clique_count(), 1);
        // φ=(0,8) is adjacent to both and they are adjacent: one triangle.
        g.insert_node(t(0, 8), 4, vec![]).unwrap();
        assert_eq!(g.clique_set().cliques, BTreeMap::from([(vec![t(0, 2), t(0, 4), t(0, 8)], 7)]));
        // (2,4) meets (0,2) only.
        g.insert_node(t(2, 4), 8, vec![]).unwrap();
        let expected = BTreeMap::from([
            (vec![t(0, 2), t(0, 4), t(0, 8)], 7),
            (vec![t(0, 2), t(2, 4)], 9),
        ]);
        assert_eq!(g.clique_set().cliques, expected);
    }

    #[test]
    fn weight_updates_propagate_and_invert() {
        let mut g = LinkGraph::new(LinkId(0));
        g.insert_node(t(0, 2), 100, vec![FlowId(1)]).unwrap();
        g.insert_node(t(0, 4), 50, vec![FlowId(2)]).unwrap();
        g.insert_node(t(1, 2), 30, vec![FlowId(3)]).unwrap();
        let before = g.clique_set();
        g.add_weight(t(0, 2), 64, FlowId(9)).unwrap();
        assert_eq!(g.node(t(0, 2)).unwrap().weight, 164);
        assert_eq!(g.node(t(0, 2)).unwrap().members, vec![FlowId(1), FlowId(9)]);
        for (tuples, w) in &g.clique_set().cliques {
            let old = before.cliques[tuples];
            if tuples.contains(&t(0, 2)) {
                assert_eq!(*w, old + 64);
            } else {
                assert_eq!(*w, old);
            }
        }
        g.remove_weight(t(0, 2), 64, FlowId(9)).unwrap();
        assert_eq!(g.clique_set(), before);
        assert!(matches!(g.add_weight(t(5, 7), 1, FlowId(0)), Err(Error::UnknownTuple { .. })));
    }

    #[test]
    fn peak_with_matches_committed_max() {
        let mut g = LinkGraph::new(LinkId(0));
        assert_eq!(g.peak_with(t(0, 4), 100), 100);
        g.insert_node(t(0, 4), 400, vec![FlowId(0)]).unwrap();
        assert_eq!(g.peak_with(t(0, 4), 100), 500);
        assert_eq!(g.peak_with(t(1, 4), 100), 100);
        assert_eq!(g.peak_with(t(0, 2), 100), 500);
    }

    fn random_tuple(rng: &mut ChaCha8Rng) -> FeatureTuple {
        let periods = [2u64, 3, 4, 6, 8, 12];
        let p = periods[rng.gen_range(0..periods.len())];
        t(rng.gen_range(0..p), p)
    }

    fn naive_clique_set(g: &LinkGraph) -> BTreeSet<Vec<FeatureTuple>> {
        naive_maximal_cliques(&g.adjacency())
            .into_iter()
            .map(|c| {
                let mut ts: Vec<_> = c.iter().map(|&i| g.nodes()[i].tuple).collect();
                ts.sort();
                ts
            })
            .collect()
    }

    #[test]
    fn incremental_matches_batch_on_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut g = LinkGraph::new(LinkId(0));
            let target = rng.gen_range(1..=15);
            while g.node_count() < target {
                let tuple = random_tuple(&mut rng);
                let w = rng.gen_range(1..100);
                if g.contains(tuple) {
                    g.add_weight(tuple, w, FlowId(0)).unwrap();
                } else {
                    g.insert_node(tuple, w, vec![FlowId(0)]).unwrap();
                }
            }
            let mut batch = g.clone();
            batch.rebuild_cliques();
            assert_eq!(g.clique_set(), batch.clique_set());
            let keys: BTreeSet<_> = g.clique_set().cliques.into_keys().collect();
            assert_eq!(keys, naive_clique_set(&g));
        }
    }

    #[test]
    fn merge_sums_identical_tuples() {
        let mut a = LinkGraph::new(LinkId(3));
        a.insert_node(t(1, 4), 100, vec![FlowId(0)]).unwrap();
        let mut b = LinkGraph::new(LinkId(3));
        b.insert_node(t(1, 4), 200, vec![FlowId(1)]).unwrap();
        b.insert_node(t(0, 4), 5, vec![FlowId(2)]).unwrap();
        let m = merge_graphs(LinkId(3), [&a, &b]).unwrap();
        assert_eq!(m.node(t(1, 4)).unwrap().weight, 300);
        assert_eq!(m.node(t(1, 4)).unwrap().members, vec![FlowId(0), FlowId(1)]);
        assert_eq!(m.node_count(), 2);
        assert!(merge_graphs(LinkId(4), [&a]).is_err());
    }

    #[test]
    fn merge_equals_build_from_pooled_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let mut parts = [LinkGraph::new(LinkId(0)), LinkGraph::new(LinkId(0))];
            let mut pooled = LinkGraph::new(LinkId(0));
            for i in 0..12 {
                let tuple = random_tuple(&mut rng);
                let w = rng.gen_range(1..50);
                parts[i % 2].commit(tuple, w, FlowId(i as u32)).unwrap();
                pooled.commit(tuple, w, FlowId(i as u32)).unwrap();
            }
            let merged = merge_graphs(LinkId(0), parts.iter()).unwrap();
            assert_eq!(merged.clique_set(), pooled.clique_set());
        }
    }

    #[test]
    fn flow_graph_mode_keeps_identical_tuples_apart() {
        let mut g = LinkGraph::new_flow_graph(LinkId(0));
        g.commit(t(0, 4), 10, FlowId(0)).unwrap();
        g.commit(t(0, 4), 20, FlowId(1)).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.clique_count(), 1);
        assert_eq!(g.max_clique_weight(), 30);
        assert_eq!(g.peak_with(t(0, 4), 5), 35);
    }

    #[test]
    fn candidates_for_match_pure_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let mut g = LinkGraph::new(LinkId(0));
            for _ in 0..8 {
                let tuple = random_tuple(&mut rng);
                g.commit(tuple, 1, FlowId(0)).unwrap();
            }
            let probe = loop {
                let tp = random_tuple(&mut rng);
                if !g.contains(tp) {
                    break tp;
                }
            };
            let cliques: Vec<BTreeSet<usize>> = g.cliques().map(|(m, _)| m.iter().copied().collect()).collect();
            let kappa: BTreeSet<usize> = g.neighbors_of(probe).into_iter().collect();
            let pure = candidate_cliques(&cliques, &kappa, usize::MAX);
            let fast: BTreeSet<BTreeSet<usize>> =
                g.candidates_for(probe).into_iter().map(|c| c.into_iter().collect()).collect();
            assert_eq!(pure, fast);
        }
    }

    #[test]
    fn dump_serializes() {
        let mut g = LinkGraph::new(LinkId(1));
        g.commit(t(0, 2), 10, FlowId(0)).unwrap();
        g.commit(t(0, 4), 10, FlowId(1)).unwrap();
        let json = serde_json::to_value(g.dump()).unwrap();
        assert_eq!(json["edges"], serde_json::json!([[0, 1]]));
        assert_eq!(json["cliques"][0]["weight"], 20);
    }

    #[test]
    fn degeneracy_of_harmonic_and_coprime_nodes() {
        let mut g = LinkGraph::new(LinkId(0));
        assert_eq!(g.degeneracy(), 0);
        for q in 0..3 {
            g.commit(t(q, 3), 1, FlowId(q as u32)).unwrap();
        }
        assert_eq!(g.degeneracy(), 0);
        g.commit(t(0, 5), 1, FlowId(9)).unwrap();
        assert_eq!(g.degeneracy(), 1);
    }
}
