//! Exhaustive enumeration of small graphs up to isomorphism, plus labeled
//! hypergraph enumeration, for the verification suites.
//!
//! Graphs on `n` vertices are packed into an edge bitmask in colex pair
//! order. Enumeration extends each canonical (n-1)-vertex graph by one new
//! vertex with every possible neighbourhood and keeps the canonical forms.
//! Canonical form is the lexicographically smallest packed mask over vertex
//! relabelings, found by branch-and-bound. Counts match the known tables
//! (all graphs 1, 2, 4, 11, 34, 156, 1044, 12346; connected 1, 1, 2, 6, 21,
//! 112, 853, 11117 for n = 1..8), which the tests pin.

use std::collections::BTreeSet;

use crate::graph::Graph;

/// A graph on at most 8 vertices packed as an edge bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmallGraph {
    pub n: usize,
    /// Bit `colex(u,v)` set when the edge `(u,v)` is present.
    pub mask: u32,
}

/// Colex index of the pair `u < v`.
fn pair_index(u: usize, v: usize) -> usize {
    debug_assert!(u < v);
    v * (v - 1) / 2 + u
}

impl SmallGraph {
    pub fn edge_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for v in 1..self.n {
            for u in 0..v {
                if self.mask >> pair_index(u, v) & 1 == 1 {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn to_graph(&self) -> Graph {
        Graph::new(self.n, self.edges()).expect("enumerated graphs are simple")
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = 1u32;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            let mut rest = adj[v] & !seen;
            while rest != 0 {
                let w = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                seen |= 1 << w;
                stack.push(w);
            }
        }
        seen.count_ones() as usize == self.n
    }

    fn adjacency(&self) -> Vec<u32> {
        let mut adj = vec![0u32; self.n];
        for (u, v) in self.edges() {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        adj
    }
}

/// Packs the relabeled mask so that smaller colex pairs carry higher bit
/// significance; integer order is then lexicographic order on the pair
/// sequence, and fixing a vertex prefix fixes a bit prefix.
struct Canonicalizer {
    n: usize,
    adj: Vec<u32>,
    bits: usize,
    best: u64,
    perm: Vec<usize>,
    used: u32,
}

impl Canonicalizer {
    fn significance(&self, pair: usize) -> u64 {
        1u64 << (self.bits - 1 - pair)
    }

    fn run(mut self) -> u32 {
        self.descend(0, 0);
        // unpack from significance order back to colex bit order
        let mut mask = 0u32;
        for pair in 0..self.bits {
            if self.best & self.significance(pair) != 0 {
                mask |= 1 << pair;
            }
        }
        mask
    }

    fn descend(&mut self, t: usize, packed: u64) {
        if t == self.n {
            if packed < self.best {
                self.best = packed;
            }
            return;
        }
        // bits determined once vertices 0..=t are placed
        let prefix_pairs = (t + 1) * t / 2;
        let prefix_mask = if prefix_pairs == 0 {
            0
        } else {
            !0u64 << (self.bits - prefix_pairs)
        };
        for src in 0..self.n {
            if self.used >> src & 1 == 1 {
                continue;
            }
            let mut extended = packed;
            for i in 0..t {
                if self.adj[src] >> self.perm[i] & 1 == 1 {
                    extended |= self.significance(pair_index(i, t));
                }
            }
            if extended & prefix_mask > self.best & prefix_mask {
                continue;
            }
            self.perm[t] = src;
            self.used |= 1 << src;
            self.descend(t + 1, extended);
            self.used &= !(1 << src);
        }
    }
}

/// Canonical form under vertex relabeling.
pub fn canonical(g: SmallGraph) -> SmallGraph {
    if g.n <= 1 {
        return g;
    }
    let bits = g.n * (g.n - 1) / 2;
    let canon = Canonicalizer {
        n: g.n,
        adj: g.adjacency(),
        bits,
        best: u64::MAX,
        perm: vec![0; g.n],
        used: 0,
    }
    .run();
    SmallGraph { n: g.n, mask: canon }
}

/// All graphs on exactly `n` vertices up to isomorphism, in canonical-mask
/// order. `n` must be at most 8.
pub fn all_graphs(n: usize) -> Vec<SmallGraph> {
    assert!(n <= 8, "exhaustive enumeration is sized for n <= 8");
    if n == 0 {
        return vec![SmallGraph { n: 0, mask: 0 }];
    }
    let mut layer: BTreeSet<SmallGraph> = BTreeSet::new();
    layer.insert(SmallGraph { n: 1, mask: 0 });
    for k in 2..=n {
        let mut next = BTreeSet::new();
        for g in &layer {
            for nbhd in 0u32..(1 << (k - 1)) {
                let mut mask = g.mask;
                for i in 0..k - 1 {
                    if nbhd >> i & 1 == 1 {
                        mask |= 1 << pair_index(i, k - 1);
                    }
                }
                next.insert(canonical(SmallGraph { n: k, mask }));
            }
        }
        layer = next;
    }
    layer.into_iter().collect()
}

/// All connected graphs on exactly `n` vertices up to isomorphism.
pub fn connected_graphs(n: usize) -> Vec<SmallGraph> {
    all_graphs(n).into_iter().filter(SmallGraph::is_connected).collect()
}

/// All graphs on `1..=n` vertices up to isomorphism.
pub fn all_graphs_up_to(n: usize) -> Vec<SmallGraph> {
    (1..=n).flat_map(all_graphs).collect()
}

/// All connected graphs on `1..=n` vertices up to isomorphism.
pub fn connected_graphs_up_to(n: usize) -> Vec<SmallGraph> {
    (1..=n).flat_map(connected_graphs).collect()
}

/// All labeled hypergraphs on `n` vertices whose edges have sizes in
/// `2..=max_edge_size`, with at most `max_edges` edges. Edges are subsets,
/// enumerated in a fixed order, so the output is deterministic.
pub fn labeled_hypergraphs(
    n: usize,
    max_edge_size: usize,
    max_edges: usize,
) -> Vec<Vec<Vec<usize>>> {
    let mut pool: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size >= 2 && size <= max_edge_size {
            pool.push((0..n).filter(|&v| mask >> v & 1 == 1).collect());
        }
    }
    fn rec(
        pool: &[Vec<usize>],
        start: usize,
        left: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        out.push(current.iter().map(|&i| pool[i].clone()).collect());
        if left == 0 {
            return;
        }
        for i in start..pool.len() {
            current.push(i);
            rec(pool, i + 1, left - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    rec(&pool, 0, max_edges, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_counts_match_the_tables() {
        let all: Vec<usize> = (1..=7).map(|n| all_graphs(n).len()).collect();
        assert_eq!(all, vec![1, 2, 4, 11, 34, 156, 1044]);
        let conn: Vec<usize> = (1..=7).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(conn, vec![1, 1, 2, 6, 21, 112, 853]);
    }

    #[test]
    fn canonical_is_isomorphism_invariant() {
        // relabeling a path must land on the same canonical form
        let p = SmallGraph {
            n: 4,
            mask: (1 << pair_index(0, 1)) | (1 << pair_index(1, 2)) | (1 << pair_index(2, 3)),
        };
        let q = SmallGraph {
            n: 4,
            mask: (1 << pair_index(0, 2)) | (1 << pair_index(1, 2)) | (1 << pair_index(1, 3)),
        };
        assert_eq!(canonical(p), canonical(q));
        assert_eq!(canonical(p).edge_count(), 3);
    }

    #[test]
    fn hypergraph_enumeration_counts() {
        // n = 3: pool is {01, 02, 12, 012}; subsets of size <= 2: 1 + 4 + 6
        let hs = labeled_hypergraphs(3, 3, 2);
        assert_eq!(hs.len(), 11);
        assert!(hs.iter().all(|h| h.len() <= 2));
    }
}
