use std::collections::VecDeque;

use super::BipartiteGraph;

const NIL: usize = usize::MAX;
const INF: u32 = u32::MAX;

/// A matching stored from both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    top: Vec<usize>,
    bottom: Vec<usize>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.top.iter().filter(|&&y| y != NIL).count()
    }

    pub fn partner_of_top(&self, x: usize) -> Option<usize> {
        Some(self.top[x]).filter(|&y| y != NIL)
    }

    pub fn partner_of_bottom(&self, y: usize) -> Option<usize> {
        Some(self.bottom[y]).filter(|&x| x != NIL)
    }

    /// Matched `(top, bottom)` pairs in top order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.top
            .iter()
            .enumerate()
            .filter(|(_, &y)| y != NIL)
            .map(|(x, &y)| (x, y))
            .collect()
    }

    /// True when both sides have equal size and every vertex is matched.
    pub fn is_perfect(&self) -> bool {
        self.top.len() == self.bottom.len() && self.top.iter().all(|&y| y != NIL)
    }

    /// For a perfect matching, `bottom -> top` as a plain vector.
    pub fn bottom_assignment(&self) -> Option<Vec<usize>> {
        self.is_perfect().then(|| self.bottom.clone())
    }
}

/// Maximum matching by Hopcroft–Karp, `O(E sqrt(V))`.
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    max_matching_from(g, &[])
}

/// Hopcroft–Karp started from a partial matching. Seed pairs that are not
/// edges or that conflict with an earlier seed are skipped.
pub fn max_matching_from(g: &BipartiteGraph, seed: &[(usize, usize)]) -> Matching {
    let mut hk = HopcroftKarp {
        g,
        top: vec![NIL; g.n_top()],
        bottom: vec![NIL; g.n_bottom()],
        dist: vec![INF; g.n_top()],
        queue: VecDeque::with_capacity(g.n_top()),
    };
    for &(x, y) in seed {
        if x < g.n_top() && y < g.n_bottom() && g.has_edge(x, y) && hk.top[x] == NIL && hk.bottom[y] == NIL {
            hk.top[x] = y;
            hk.bottom[y] = x;
        }
    }
    // Greedy pass before the phased search.
    for x in 0..g.n_top() {
        if hk.top[x] != NIL {
            continue;
        }
        if let Some(y) = g.neighbors(x).ones().find(|&y| hk.bottom[y] == NIL) {
            hk.top[x] = y;
            hk.bottom[y] = x;
        }
    }
    while hk.layer() {
        for x in 0..g.n_top() {
            if hk.top[x] == NIL {
                hk.augment(x);
            }
        }
    }
    Matching {
        top: hk.top,
        bottom: hk.bottom,
    }
}

pub fn has_perfect_matching(g: &BipartiteGraph) -> bool {
    g.n_top() == g.n_bottom() && max_matching(g).is_perfect()
}

struct HopcroftKarp<'a> {
    g: &'a BipartiteGraph,
    top: Vec<usize>,
    bottom: Vec<usize>,
    dist: Vec<u32>,
    queue: VecDeque<usize>,
}

impl HopcroftKarp<'_> {
    /// BFS layering from free top vertices; true if a free bottom vertex is reachable.
    fn layer(&mut self) -> bool {
        self.queue.clear();
        for x in 0..self.top.len() {
            if self.top[x] == NIL {
                self.dist[x] = 0;
                self.queue.push_back(x);
            } else {
                self.dist[x] = INF;
            }
        }
        let mut found = false;
        while let Some(x) = self.queue.pop_front() {
            for y in self.g.neighbors(x).ones() {
                let next = self.bottom[y];
                if next == NIL {
                    found = true;
                } else if self.dist[next] == INF {
                    self.dist[next] = self.dist[x] + 1;
                    self.queue.push_back(next);
                }
            }
        }
        found
    }

    fn augment(&mut self, x: usize) -> bool {
        let g = self.g;
        for y in g.neighbors(x).ones() {
            let next = self.bottom[y];
            if next == NIL || (self.dist[next] == self.dist[x] + 1 && self.augment(next)) {
                self.top[x] = y;
                self.bottom[y] = x;
                return true;
            }
        }
        self.dist[x] = INF;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn complete_and_hall_violation() {
        let k33 = BipartiteGraph::from_edges(3, 3, (0..3).flat_map(|x| (0..3).map(move |y| (x, y))));
        let m = max_matching(&k33);
        assert!(m.is_perfect());
        assert_eq!(m.size(), 3);
        assert!(has_perfect_matching(&k33));

        let g = BipartiteGraph::from_edges(2, 2, [(0, 0), (1, 0)]);
        assert!(!has_perfect_matching(&g));
        assert_eq!(max_matching(&g).size(), 1);
    }

    #[test]
    fn empty_graph() {
        let g = BipartiteGraph::new(0, 0);
        assert_eq!(max_matching(&g).size(), 0);
        assert!(has_perfect_matching(&g));
        let g = BipartiteGraph::new(2, 3);
        assert!(max_matching(&g).pairs().is_empty());
        assert!(!has_perfect_matching(&g));
    }

    #[test]
    fn exhaustive_3x3_against_permutations() {
        let ps = perms(3);
        for bits in 0u32..(1 << 9) {
            let g = BipartiteGraph::from_edges(
                3,
                3,
                (0..9).filter(|k| bits >> k & 1 == 1).map(|k| (k / 3, k % 3)),
            );
            let oracle = ps.iter().any(|p| (0..3).all(|x| g.has_edge(x, p[x])));
            let m = max_matching(&g);
            assert_eq!(m.is_perfect(), oracle, "bits {bits:09b}");
            for (x, y) in m.pairs() {
                assert!(g.has_edge(x, y));
            }
        }
    }

    #[test]
    fn seeded_matching_is_still_maximum() {
        // Seeding 0-0 is a bad start; augmentation must recover.
        let g = BipartiteGraph::from_edges(3, 3, [(0, 0), (0, 1), (1, 0), (2, 2)]);
        let m = max_matching_from(&g, &[(0, 0), (1, 0), (2, 1)]);
        assert!(m.is_perfect());
        assert_eq!(m.partner_of_bottom(0), Some(1));
    }
}
