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

//! Per-link hyper-flow graphs and their weighted maximal cliques.
//!
//! Flows that share a feature tuple `(q, p)` on a link use exactly the same
//! slots, so they collapse into one node weighted by their total frame bytes.
//! Two nodes are adjacent iff `gcd(p_a, p_b) | (q_a - q_b)`, which holds iff
//! their slot progressions intersect. Any set of pairwise-adjacent nodes
//! meets on a common slot, so slot occupancy is read off clique weights.

mod bron_kerbosch;
mod graph;

pub use bron_kerbosch::{degeneracy_order, maximal_cliques};
pub use graph::{candidate_cliques, merge_graphs, CliqueSet, GraphDump, HyperFlowNode, LinkGraph};

use serde::{Deserialize, Serialize};

use crate::arith::gcd;

/// Baseline forwarding slot and slot period of a progression `q + k·p`.
/// `q` is stored reduced modulo `p`: the horizon is cyclic, so `q` and
/// `q + p` describe the same slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeatureTuple {
    pub q: u64,
    pub period: u64,
}

impl FeatureTuple {
    pub fn new(q: u64, period: u64) -> Self {
        assert!(period > 0, "feature tuple with zero period");
        Self { q: q % period, period }
    }

    /// Whether slot `s` belongs to the progression.
    pub fn contains(&self, slot: u64) -> bool {
        slot % self.period == self.q
    }
}

/// Adjacency rule: the two progressions share at least one slot.
pub fn connected(a: FeatureTuple, b: FeatureTuple) -> bool {
    let g = gcd(a.period, b.period);
    a.q % g == b.q % g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn share_slot(a: FeatureTuple, b: FeatureTuple) -> bool {
        let horizon = a.period / gcd(a.period, b.period) * b.period;
        (0..horizon).any(|s| a.contains(s) && b.contains(s))
    }

    #[test]
    fn connected_examples() {
        let a = FeatureTuple::new(2, 4);
        let b = FeatureTuple::new(4, 6);
        assert!(share_slot(a, b));
        assert!(a.contains(10) && b.contains(10));
        assert!(connected(a, b));
        let c = FeatureTuple::new(0, 2);
        let d = FeatureTuple::new(1, 4);
        assert!(!share_slot(c, d));
        assert!(!connected(c, d));
        assert!(connected(a, a));
    }

    #[test]
    fn connected_matches_slot_scan() {
        for pa in 1..=12 {
            for pb in 1..=12 {
                for qa in 0..pa {
                    for qb in 0..pb {
                        let (a, b) = (FeatureTuple::new(qa, pa), FeatureTuple::new(qb, pb));
                        assert_eq!(connected(a, b), share_slot(a, b), "{a:?} {b:?}");
                    }
                }
            }
        }
    }
}
