//! Row-streaming enumeration shared by the brute and normalized counts.
//!
//! All rows but the last form the prefix and are enumerated cell by cell;
//! the last row is then either enumerated outright, or (with the skeleton
//! filter) constrained first: for each complete row `k`, the columns that a
//! maximum matching of the prefix part of `G_k` can leave free are exactly
//! the places where the last row must not copy row `k`. Only last rows
//! avoiding those letters are tested, and a column with every letter
//! excluded abandons the whole subtree.

use rayon::prelude::*;

use super::{PrefixFilter, Shard};
use crate::cantorian::small::{column_saturating_matching, perfect_matching, SmallChecker, MAX_SMALL_N};

/// Counts for one shard or unit.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    pub count: u64,
    /// Indexed by the number of cells equal to 1, when requested.
    pub histogram: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.count += other.count;
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self
    }
}

pub(crate) struct Space<'a> {
    pub n: usize,
    pub s: usize,
    /// Prefix rows fixed to the given cells, starting at row 0.
    pub fixed_rows: Vec<Vec<u8>>,
    pub skeleton: bool,
    pub histogram: bool,
    pub filter: Option<&'a dyn PrefixFilter>,
}

impl Space<'_> {
    fn free_cells(&self) -> usize {
        (self.n - 1 - self.fixed_rows.len()) * self.n
    }

    /// Number of leading free cells that index work units for `shards` shards.
    pub(crate) fn unit_cells(&self, shards: usize) -> usize {
        let target = 64 * shards.max(1) as u128;
        let mut c = 0;
        let mut units = 1u128;
        while c < self.free_cells() && units < target {
            units *= self.s as u128;
            c += 1;
        }
        c
    }

    pub(crate) fn run(&self, shard: Shard, jobs: usize) -> (Tally, u64) {
        let c = self.unit_cells(shard.of);
        let units: Vec<u64> = (0..(self.s as u64).pow(c as u32))
            .filter(|u| u % shard.of as u64 == shard.index as u64)
            .collect();
        let work = || {
            units
                .par_iter()
                .map(|&u| self.unit(u, c))
                .reduce(Tally::default, Tally::merge)
        };
        let tally = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        };
        (tally, (self.s as u64).pow(c as u32))
    }

    fn unit(&self, unit: u64, c: usize) -> Tally {
        let (n, s) = (self.n, self.s);
        let mut cells = vec![0u8; n * n];
        for (i, row) in self.fixed_rows.iter().enumerate() {
            cells[i * n..(i + 1) * n].copy_from_slice(row);
        }
        let start = self.fixed_rows.len() * n;
        let end = (n - 1) * n;
        let mut u = unit;
        for cell in &mut cells[start..start + c] {
            *cell = (u % s as u64) as u8;
            u /= s as u64;
        }
        let mut leaf = Leaf::new(n, s, self.histogram);
        let first_free_row = self.fixed_rows.len();
        let mut keys = vec![0u64; n - 1 - first_free_row];
        loop {
            let weight = match self.filter {
                None => 1,
                Some(f) => {
                    for (slot, i) in keys.iter_mut().zip(first_free_row..n - 1) {
                        *slot = row_key(&cells[i * n..(i + 1) * n], s);
                    }
                    f.weight(&keys)
                }
            };
            if weight > 0 {
                if self.skeleton {
                    leaf.skeleton(&mut cells, weight);
                } else {
                    leaf.plain(&mut cells, weight);
                }
            }
            // Odometer over the free cells after the unit cells.
            let mut pos = start + c;
            loop {
                if pos >= end {
                    return leaf.tally;
                }
                cells[pos] += 1;
                if (cells[pos] as usize) < s {
                    break;
                }
                cells[pos] = 0;
                pos += 1;
            }
        }
    }
}

fn row_key(row: &[u8], s: usize) -> u64 {
    row.iter().fold(0u64, |acc, &c| acc * s as u64 + c as u64)
}

struct Leaf {
    n: usize,
    s: usize,
    checker: SmallChecker,
    /// `by_letter[j * s + a]`: prefix rows holding `a` in column `j`.
    by_letter: Vec<u16>,
    forbidden: Vec<bool>,
    allowed: Vec<Vec<u8>>,
    tally: Tally,
}

impl Leaf {
    fn new(n: usize, s: usize, histogram: bool) -> Self {
        Leaf {
            n,
            s,
            checker: SmallChecker::new(n, s),
            by_letter: vec![0; n * s],
            forbidden: vec![false; n * s],
            allowed: vec![Vec::with_capacity(s); n],
            tally: Tally {
                count: 0,
                histogram: if histogram { vec![0; n * n + 1] } else { Vec::new() },
            },
        }
    }

    fn record(&mut self, cells: &[u8], weight: u64) {
        self.tally.count += weight;
        if !self.tally.histogram.is_empty() {
            let ones = cells.iter().filter(|&&c| c == 1).count();
            self.tally.histogram[ones] += weight;
        }
    }

    /// Tests every last row.
    fn plain(&mut self, cells: &mut [u8], weight: u64) {
        let (n, s) = (self.n, self.s);
        let last = (n - 1) * n;
        cells[last..].fill(0);
        loop {
            if self.checker.is_cantorian(cells) {
                self.record(cells, weight);
            }
            let mut pos = last;
            loop {
                if pos == n * n {
                    return;
                }
                cells[pos] += 1;
                if (cells[pos] as usize) < s {
                    break;
                }
                cells[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Derives the letters the last row may not use, then tests only the last
    /// row itself on the survivors.
    fn skeleton(&mut self, cells: &mut [u8], weight: u64) {
        let (n, s) = (self.n, self.s);
        let p = n - 1;
        self.by_letter.fill(0);
        for i in 0..p {
            for j in 0..n {
                self.by_letter[j * s + cells[i * n + j] as usize] |= 1 << i;
            }
        }
        self.forbidden.fill(false);
        let mut row_adj = [0u16; MAX_SMALL_N];
        let mut col_adj = [0u16; MAX_SMALL_N];
        for k in 0..p {
            let rk = &cells[k * n..(k + 1) * n];
            if (0..k).any(|r| &cells[r * n..(r + 1) * n] == rk) {
                continue;
            }
            for j in 0..n {
                col_adj[j] = self.by_letter[j * s + rk[j] as usize];
            }
            for (i, slot) in row_adj.iter_mut().enumerate().take(p) {
                let mut m = 0u16;
                for (j, &col) in col_adj.iter().enumerate().take(n) {
                    m |= (col >> i & 1) << j;
                }
                *slot = m;
            }
            let Some(col_of_row) = column_saturating_matching(&row_adj[..p]) else {
                continue;
            };
            let mut matched = 0u16;
            for &c in &col_of_row[..p] {
                matched |= 1 << c;
            }
            let all: u16 = (1u32 << n).wrapping_sub(1) as u16;
            // Alternating search from the free column over prefix rows.
            let mut reached = all & !matched;
            let mut frontier = reached;
            let mut seen_rows = 0u16;
            while frontier != 0 {
                let c = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let mut rows = col_adj[c] & !seen_rows;
                seen_rows |= rows;
                while rows != 0 {
                    let r = rows.trailing_zeros() as usize;
                    rows &= rows - 1;
                    let next = 1u16 << col_of_row[r];
                    if reached & next == 0 {
                        reached |= next;
                        frontier |= next;
                    }
                }
            }
            while reached != 0 {
                let j = reached.trailing_zeros() as usize;
                reached &= reached - 1;
                self.forbidden[j * s + rk[j] as usize] = true;
            }
        }
        for j in 0..n {
            self.allowed[j].clear();
            for a in 0..s {
                if !self.forbidden[j * s + a] {
                    self.allowed[j].push(a as u8);
                }
            }
            if self.allowed[j].is_empty() {
                return;
            }
        }
        let last = p * n;
        let mut idx = [0usize; MAX_SMALL_N];
        for j in 0..n {
            cells[last + j] = self.allowed[j][0];
        }
        let bottom = 1u16 << p;
        let mut adj = [0u16; MAX_SMALL_N];
        loop {
            for j in 0..n {
                adj[j] = self.by_letter[j * s + cells[last + j] as usize] | bottom;
            }
            if !perfect_matching(&adj[..n]) {
                self.record(cells, weight);
            }
            let mut j = 0;
            loop {
                if j == n {
                    return;
                }
                idx[j] += 1;
                if idx[j] < self.allowed[j].len() {
                    cells[last + j] = self.allowed[j][idx[j]];
                    break;
                }
                idx[j] = 0;
                cells[last + j] = self.allowed[j][0];
                j += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn skeleton_matches_plain_on_random_prefixes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3000 {
            let n = rng.gen_range(2..=5);
            let s = rng.gen_range(2..=4);
            let mut cells: Vec<u8> = (0..n * n).map(|_| rng.gen_range(0..s) as u8).collect();
            let mut a = Leaf::new(n, s, true);
            let mut b = Leaf::new(n, s, true);
            a.plain(&mut cells.clone(), 1);
            b.skeleton(&mut cells, 1);
            assert_eq!(a.tally.count, b.tally.count);
            assert_eq!(a.tally.histogram, b.tally.histogram);
        }
    }
}
