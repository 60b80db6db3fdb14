//! Counting last columns analytically for binary tableaux.
//!
//! Fix the first `n - 1` columns (the prefix) and the last row to all ones.
//! Row `k` lies in `Perm(T)` iff some row `u` with `x[u] == x[k]` can take the
//! last column while the other rows cover the prefix columns inside `G_k`.
//! The rows that can be left out of a maximum matching of the prefix part of
//! `G_k` are found by alternating search from one unmatched row; each such
//! row `u` yields the condition `x[u] != x[k]`. The conditions are solved as
//! parities.

use crate::cantorian::small::{column_saturating_matching, MAX_SMALL_N};
use crate::{Error, Result};

/// Union-find over boolean variables with parity constraints.
#[derive(Clone, Debug)]
pub struct ParityUnionFind {
    parent: Vec<usize>,
    /// Parity of each node relative to its parent.
    parity: Vec<bool>,
    rank: Vec<u8>,
    consistent: bool,
}

impl ParityUnionFind {
    pub fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n).collect(),
            parity: vec![false; n],
            rank: vec![0; n],
            consistent: true,
        }
    }

    /// Root of `x` and the parity of `x` relative to it.
    pub fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, up) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= up;
        (root, self.parity[x])
    }

    /// Records `x[a] xor x[b] == differ`. Returns false, and marks the system
    /// inconsistent, on contradiction.
    pub fn relate(&mut self, a: usize, b: usize, differ: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if pa ^ pb != differ {
                self.consistent = false;
            }
            return self.consistent;
        }
        let (lo, hi) = if self.rank[ra] < self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi;
        self.parity[lo] = pa ^ pb ^ differ;
        if self.rank[lo] == self.rank[hi] {
            self.rank[hi] += 1;
        }
        self.consistent
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x).0 == x).count()
    }
}

/// Number of 0/1 assignments to `n_vars` variables satisfying every
/// `x[a] != x[b]`, with the variables in `fixed` pinned to given values.
pub fn count_parity_solutions(n_vars: usize, differ: &[(usize, usize)], fixed: &[(usize, bool)]) -> u128 {
    // An extra variable stands for the constant 0.
    let zero = n_vars;
    let mut uf = ParityUnionFind::new(n_vars + 1);
    for &(a, b) in differ {
        uf.relate(a, b, true);
    }
    for &(v, value) in fixed {
        uf.relate(v, zero, value);
    }
    if !uf.is_consistent() {
        return 0;
    }
    1u128 << (uf.components() - 1)
}

/// The conditions `x[u] != x[k]` forced on the last column by a prefix given
/// as row masks of width `n - 1` (the last row must be all ones). `None`
/// means some row is in `Perm(T)` whatever the last column is.
pub fn last_column_constraints(n: usize, rows: &[u64]) -> Result<Option<Vec<(usize, usize)>>> {
    check_prefix(n, rows)?;
    let mut out = Vec::new();
    let mut scratch = Scratch::default();
    for k in 0..n {
        let exposed = scratch.exposed_rows(n, rows, k);
        if exposed >> k & 1 == 1 {
            return Ok(None);
        }
        let mut e = exposed;
        while e != 0 {
            let u = e.trailing_zeros() as usize;
            e &= e - 1;
            out.push((u.min(k), u.max(k)));
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(Some(out))
}

/// Number of last columns (with the bottom cell equal to 1) that make the
/// tableau Cantorian.
pub fn last_column_count(n: usize, rows: &[u64]) -> Result<u64> {
    check_prefix(n, rows)?;
    Ok(LastColumnCounter::new(n).count(rows))
}

fn check_prefix(n: usize, rows: &[u64]) -> Result<()> {
    if !(2..=MAX_SMALL_N).contains(&n) {
        return Err(Error::InvalidArgument(format!("last-column counting needs 2 <= n <= {MAX_SMALL_N}, got {n}")));
    }
    if rows.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rows.len(),
        });
    }
    let full = (1u64 << (n - 1)) - 1;
    if rows.iter().any(|&r| r & !full != 0) {
        return Err(Error::InvalidArgument(format!("prefix rows must have width {}", n - 1)));
    }
    if rows[n - 1] != full {
        return Err(Error::InvalidArgument("the last row of the prefix must be all ones".into()));
    }
    Ok(())
}

#[derive(Default)]
struct Scratch {
    adj: [u16; MAX_SMALL_N],
}

impl Scratch {
    /// Rows left unmatched by some maximum matching of the prefix part of
    /// `G_k`, or 0 when no matching covers every prefix column.
    fn exposed_rows(&mut self, n: usize, rows: &[u64], k: usize) -> u16 {
        let w = n - 1;
        let full = (1u64 << w) - 1;
        let rk = rows[k];
        // agree[i]: prefix columns where row i equals row k.
        let mut agree = [0u64; MAX_SMALL_N];
        for (i, &r) in rows.iter().enumerate() {
            agree[i] = !(r ^ rk) & full;
        }
        for j in 0..w {
            let mut m = 0u16;
            for (i, a) in agree.iter().enumerate().take(n) {
                m |= ((a >> j & 1) as u16) << i;
            }
            self.adj[j] = m;
        }
        let Some(row_of_col) = column_saturating_matching(&self.adj[..w]) else {
            return 0;
        };
        let mut matched = 0u16;
        for &r in &row_of_col[..w] {
            matched |= 1 << r;
        }
        let all: u16 = if n == 16 { u16::MAX } else { (1 << n) - 1 };
        let mut reached = all & !matched;
        let mut frontier = reached;
        let mut seen_cols = 0u64;
        while frontier != 0 {
            let r = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let mut cols = agree[r] & !seen_cols;
            seen_cols |= cols;
            while cols != 0 {
                let c = cols.trailing_zeros() as usize;
                cols &= cols - 1;
                let next = 1u16 << row_of_col[c];
                if reached & next == 0 {
                    reached |= next;
                    frontier |= next;
                }
            }
        }
        reached
    }
}

/// Reusable counter for one `n`.
pub(crate) struct LastColumnCounter {
    n: usize,
    scratch: Scratch,
}

impl LastColumnCounter {
    pub(crate) fn new(n: usize) -> Self {
        LastColumnCounter {
            n,
            scratch: Scratch::default(),
        }
    }

    pub(crate) fn count(&mut self, rows: &[u64]) -> u64 {
        let n = self.n;
        let mut uf = ParityUnionFind::new(n);
        for k in 0..n {
            let exposed = self.scratch.exposed_rows(n, rows, k);
            if exposed >> k & 1 == 1 {
                return 0;
            }
            let mut e = exposed;
            while e != 0 {
                let u = e.trailing_zeros() as usize;
                e &= e - 1;
                if !uf.relate(u, k, true) {
                    return 0;
                }
            }
        }
        // The bottom cell is pinned, so its component contributes no freedom.
        1u64 << (uf.components() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantorian::small::is_cantorian_bits;

    fn brute(n: usize, rows: &[u64]) -> u64 {
        (0u64..1 << (n - 1))
            .filter(|&x| {
                let full: Vec<u64> = (0..n)
                    .map(|i| {
                        let bit = if i == n - 1 { 1 } else { x >> i & 1 };
                        rows[i] | bit << (n - 1)
                    })
                    .collect();
                is_cantorian_bits(n, &full)
            })
            .count() as u64
    }

    #[test]
    fn parity_basics() {
        assert_eq!(count_parity_solutions(3, &[], &[]), 8);
        assert_eq!(count_parity_solutions(3, &[(0, 1), (1, 2), (2, 0)], &[]), 0);
        assert_eq!(count_parity_solutions(3, &[(0, 1), (1, 2)], &[]), 2);
        assert_eq!(count_parity_solutions(3, &[(0, 1)], &[(2, true)]), 2);
        assert_eq!(count_parity_solutions(2, &[(0, 1)], &[(0, true), (1, true)]), 0);
        let mut uf = ParityUnionFind::new(4);
        assert!(uf.relate(0, 1, true));
        assert!(uf.relate(1, 2, true));
        assert!(!(uf.find(0).1 ^ uf.find(2).1));
        assert!(!uf.relate(0, 2, true));
        assert!(!uf.is_consistent());
    }

    #[test]
    fn exhaustive_against_completion_oracle() {
        for n in 2..=4usize {
            let w = n - 1;
            let free = w * (n - 1);
            for p in 0u64..1 << free {
                let mut rows: Vec<u64> = (0..n - 1).map(|i| p >> (i * w) & ((1 << w) - 1)).collect();
                rows.push((1 << w) - 1);
                assert_eq!(last_column_count(n, &rows).unwrap(), brute(n, &rows), "n={n} prefix={rows:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_prefixes() {
        assert!(last_column_count(3, &[0, 0, 1]).is_err());
        assert!(last_column_count(3, &[0, 0]).is_err());
        assert!(last_column_count(3, &[8, 0, 3]).is_err());
        assert!(last_column_count(1, &[0]).is_err());
    }

    #[test]
    fn constraints_agree_with_count() {
        // ab/ba-like prefix: rows 0, 1 over one column, last row 1.
        let c = last_column_constraints(3, &[0b00, 0b11, 0b11]).unwrap();
        match c {
            None => assert_eq!(last_column_count(3, &[0b00, 0b11, 0b11]).unwrap(), 0),
            Some(c) => assert_eq!(
                count_parity_solutions(3, &c, &[(2, true)]) as u64,
                last_column_count(3, &[0b00, 0b11, 0b11]).unwrap()
            ),
        }
    }
}
