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

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{FeatureTuple, HyperFlowNode};
use crate::model::LinkId;
use crate::synthesis::GlobalCliqueIndex;

/// Default cap on sub-cliques visited per overflow clique.
pub const DEFAULT_DETECTION_BUDGET: u64 = 1_000_000;

/// A maximal clique whose combined weight exceeds Λ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverflowClique {
    pub link: LinkId,
    /// Member nodes, ascending by tuple.
    pub nodes: Vec<HyperFlowNode>,
    pub weight: u64,
}

/// A minimal overweight sub-clique: `ζ > Λ` and `ζ − ℓ_min ≤ Λ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictClique {
    pub link: LinkId,
    /// Member nodes, ascending by tuple.
    pub nodes: Vec<HyperFlowNode>,
    pub weight: u64,
    /// Common slots `q̈ + k·p̈` of all members, once positioned.
    pub confluence: Option<FeatureTuple>,
}

/// Cliques with weight strictly above `capacity`, by link then tuple list.
pub fn overflow_cliques(index: &GlobalCliqueIndex, capacity: u64) -> Vec<OverflowClique> {
    let mut out = Vec::new();
    for (&link, graph) in index.graphs() {
        let mut local: Vec<OverflowClique> = graph
            .cliques()
            .filter(|&(_, w)| w > capacity)
            .map(|(members, weight)| {
                let mut nodes: Vec<_> = members.iter().map(|&i| graph.nodes()[i].clone()).collect();
                nodes.sort_by_key(|n| n.tuple);
                OverflowClique { link, nodes, weight }
            })
            .collect();
        local.sort_by(|a, b| a.nodes.iter().map(|n| n.tuple).cmp(b.nodes.iter().map(|n| n.tuple)));
        out.extend(local);
    }
    out
}

/// Every subset of `weights` (as ascending index lists) that exceeds `capacity` while
/// dropping its lightest member fits.
///
/// Items are visited in ascending weight. A node is either flexible (may still be
/// dropped) or reserved; dropping the k-th flexible node reserves the ones before it,
/// so each subset is reached along exactly one path.
pub fn minimal_overweight_subsets(weights: &[u64], capacity: u64, budget: u64) -> Result<BTreeSet<Vec<usize>>> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| (weights[i], i));
    let total: u64 = weights.iter().sum();
    let mut search = Search { weights, capacity, budget, visited: 0, found: BTreeSet::new() };
    let mut reserved = Vec::new();
    search.visit(&order, &mut reserved, total)?;
    Ok(search.found)
}

struct Search<'a> {
    weights: &'a [u64],
    capacity: u64,
    budget: u64,
    visited: u64,
    found: BTreeSet<Vec<usize>>,
}

impl Search<'_> {
    /// `flexible` is ascending by weight; `reserved` holds the kept nodes.
    fn visit(&mut self, flexible: &[usize], reserved: &mut Vec<usize>, weight: u64) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::DetectionBudgetExceeded(self.budget));
        }
        if weight <= self.capacity {
            return Ok(());
        }
        let lightest = flexible
            .first()
            .into_iter()
            .chain(reserved.iter())
            .map(|&i| self.weights[i])
            .min()
            .expect("overweight set is non-empty");
        if weight - lightest <= self.capacity {
            let mut set: Vec<usize> = flexible.iter().chain(reserved.iter()).copied().collect();
            set.sort_unstable();
            self.found.insert(set);
            return Ok(());
        }
        let mark = reserved.len();
        for (k, &drop) in flexible.iter().enumerate() {
            self.visit(&flexible[k + 1..], reserved, weight - self.weights[drop])?;
            reserved.push(drop);
        }
        reserved.truncate(mark);
        Ok(())
    }
}

/// Minimal overweight sub-cliques of one overflow clique.
pub fn detect_conflict_cliques(clique: &OverflowClique, capacity: u64, budget: u64) -> Result<Vec<ConflictClique>> {
    let weights: Vec<u64> = clique.nodes.iter().map(|n| n.weight).collect();
    Ok(minimal_overweight_subsets(&weights, capacity, budget)?
        .into_iter()
        .map(|set| {
            let nodes: Vec<_> = set.iter().map(|&i| clique.nodes[i].clone()).collect();
            let weight = nodes.iter().map(|n| n.weight).sum();
            ConflictClique { link: clique.link, nodes, weight, confluence: None }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(weights: &[u64], capacity: u64) -> BTreeSet<Vec<usize>> {
        let n = weights.len();
        (1u32..1 << n)
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| {
                let w: u64 = s.iter().map(|&i| weights[i]).sum();
                let min = s.iter().map(|&i| weights[i]).min().unwrap();
                w > capacity && w - min <= capacity
            })
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(minimal_overweight_subsets(&[3, 4, 5], 8, 100).unwrap(), BTreeSet::from([vec![1, 2]]));
        assert_eq!(minimal_overweight_subsets(&[5, 6], 8, 100).unwrap(), BTreeSet::from([vec![0, 1]]));
        assert_eq!(minimal_overweight_subsets(&[9], 8, 100).unwrap(), BTreeSet::from([vec![0]]));
        assert!(minimal_overweight_subsets(&[1, 2], 8, 100).unwrap().is_empty());
    }

    #[test]
    fn unsorted_input_reports_original_indices() {
        assert_eq!(minimal_overweight_subsets(&[5, 3, 4], 8, 100).unwrap(), BTreeSet::from([vec![0, 2]]));
    }

    #[test]
    fn budget_is_enforced() {
        let weights = vec![10; 10];
        assert!(matches!(
            minimal_overweight_subsets(&weights, 15, 3),
            Err(Error::DetectionBudgetExceeded(3))
        ));
    }

    proptest::proptest! {
        #[test]
        fn matches_exhaustive_filter(weights in proptest::collection::vec(1u64..60, 1..=10), cap in 1u64..200) {
            proptest::prop_assert_eq!(minimal_overweight_subsets(&weights, cap, u64::MAX).unwrap(), brute(&weights, cap));
        }
    }
}
