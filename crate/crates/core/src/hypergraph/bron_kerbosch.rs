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

//! Bron–Kerbosch with Tomita pivoting, driven by a degeneracy ordering of the
//! outer loop (Eppstein, Löffler & Strash).

use fixedbitset::FixedBitSet;

/// Vertices in degeneracy order, and the degeneracy itself.
pub fn degeneracy_order(adj: &[FixedBitSet]) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(|a| a.count_ones(..)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut degeneracy = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("vertex left");
        degeneracy = degeneracy.max(degree[v]);
        removed[v] = true;
        order.push(v);
        for u in adj[v].ones() {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    (order, degeneracy)
}

/// All maximal cliques, each as an ascending list of vertex indices.
pub fn maximal_cliques(adj: &[FixedBitSet]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let (order, _) = degeneracy_order(adj);
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut out = Vec::new();
    let mut r = Vec::new();
    for &v in &order {
        let mut p = FixedBitSet::with_capacity(n);
        let mut x = FixedBitSet::with_capacity(n);
        for u in adj[v].ones() {
            if position[u] > position[v] {
                p.insert(u);
            } else {
                x.insert(u);
            }
        }
        r.push(v);
        expand(adj, &mut r, p, x, &mut out);
        r.pop();
    }
    out
}

fn expand(adj: &[FixedBitSet], r: &mut Vec<usize>, mut p: FixedBitSet, mut x: FixedBitSet, out: &mut Vec<Vec<usize>>) {
    if p.is_clear() {
        if x.is_clear() {
            let mut clique = r.clone();
            clique.sort_unstable();
            out.push(clique);
        }
        return;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| p.intersection_count(&adj[u]))
        .expect("p is non-empty");
    let mut branch = p.clone();
    branch.difference_with(&adj[pivot]);
    for v in branch.ones() {
        let mut np = p.clone();
        np.intersect_with(&adj[v]);
        let mut nx = x.clone();
        nx.intersect_with(&adj[v]);
        r.push(v);
        expand(adj, r, np, nx, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}
