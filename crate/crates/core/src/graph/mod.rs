//! Bipartite matching and directed Hamiltonicity on bitset adjacency.

mod hamilton;
mod matching;

use fixedbitset::FixedBitSet;

pub use hamilton::{digraph_hamiltonian, hamiltonian_cycle, HamiltonConfig, HamiltonOutcome, HamiltonStage};
pub use matching::{has_perfect_matching, max_matching, max_matching_from, Matching};

/// Bipartite graph with `n_top` top vertices and `n_bottom` bottom vertices.
/// `adjacency[x]` holds the bottom neighbours of top vertex `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_bottom: usize,
    adjacency: Vec<FixedBitSet>,
}

impl BipartiteGraph {
    pub fn new(n_top: usize, n_bottom: usize) -> Self {
        BipartiteGraph {
            n_bottom,
            adjacency: vec![FixedBitSet::with_capacity(n_bottom); n_top],
        }
    }

    pub fn from_edges(n_top: usize, n_bottom: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n_top, n_bottom);
        for (x, y) in edges {
            g.add_edge(x, y);
        }
        g
    }

    /// Panics if either endpoint is out of range.
    pub fn add_edge(&mut self, top: usize, bottom: usize) {
        assert!(bottom < self.n_bottom, "bottom vertex {bottom} out of range");
        self.adjacency[top].insert(bottom);
    }

    #[inline]
    pub fn has_edge(&self, top: usize, bottom: usize) -> bool {
        self.adjacency[top].contains(bottom)
    }

    #[inline]
    pub fn n_top(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn n_bottom(&self) -> usize {
        self.n_bottom
    }

    #[inline]
    pub fn neighbors(&self, top: usize) -> &FixedBitSet {
        &self.adjacency[top]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.count_ones(..)).sum()
    }
}

/// Directed graph; `out[v]` is the out-neighbourhood of `v`. Self-loops are
/// allowed and only matter for the one-vertex graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<FixedBitSet>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            out: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut d = Self::new(n);
        for (u, v) in edges {
            d.add_edge(u, v);
        }
        d
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))))
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        assert!(to < self.out.len(), "vertex {to} out of range");
        self.out[from].insert(to);
    }

    #[inline]
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out[from].contains(to)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.out.len()
    }

    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &FixedBitSet {
        &self.out[v]
    }

    /// In-neighbourhoods, computed on demand.
    pub fn transpose(&self) -> Digraph {
        let mut t = Digraph::new(self.n());
        for u in 0..self.n() {
            for v in self.out[u].ones() {
                t.add_edge(v, u);
            }
        }
        t
    }

    /// The bipartite graph with an edge `(u, v)` for every arc `u -> v`.
    /// A Hamiltonian cycle is a perfect matching of this graph.
    pub fn bipartite_double_cover(&self) -> BipartiteGraph {
        BipartiteGraph {
            n_bottom: self.n(),
            adjacency: self.out.clone(),
        }
    }

    /// Checks that `cycle` visits every vertex once along existing arcs.
    pub fn is_hamiltonian_cycle(&self, cycle: &[usize]) -> bool {
        let n = self.n();
        if cycle.len() != n || n == 0 {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(n);
        for &v in cycle {
            if v >= n || seen.put(v) {
                return false;
            }
        }
        (0..n).all(|k| self.has_edge(cycle[k], cycle[(k + 1) % n]))
    }
}
