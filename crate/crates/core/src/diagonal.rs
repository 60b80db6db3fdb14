//! Diagonal constructions on finite truncations of infinite tableaux.
//!
//! Rows are prefixes of length `D` of infinite words. The greedy procedure
//! realizes a target word as a permuted diagonal; the block procedure builds
//! a diagonal that differs from every word of a list. At finite depth both
//! may run out of candidates, which is reported rather than treated as an
//! error.

use std::collections::HashSet;

use num_integer::Integer;
use serde::Serialize;

use crate::{Alphabet, Error, Result, Word};

/// Equal-length prefixes of infinite rows, stored flat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixList {
    alphabet: Alphabet,
    depth: usize,
    digits: Vec<u8>,
}

impl PrefixList {
    pub fn new(alphabet: Alphabet, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(PrefixList {
            alphabet,
            depth,
            digits: Vec::new(),
        })
    }

    pub fn from_words(alphabet: Alphabet, words: &[Word]) -> Result<Self> {
        let depth = words.first().map_or(0, Word::len);
        let mut list = PrefixList::new(alphabet, depth)?;
        for w in words {
            list.push(w.symbols())?;
        }
        Ok(list)
    }

    pub fn push(&mut self, row: &[u8]) -> Result<()> {
        if row.len() != self.depth {
            return Err(Error::DimensionMismatch {
                expected: self.depth,
                found: row.len(),
            });
        }
        if let Some(&bad) = row.iter().find(|&&c| !self.alphabet.contains(c)) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad.to_string(),
                size: self.alphabet.size(),
            });
        }
        self.digits.extend_from_slice(row);
        Ok(())
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.digits.len() / self.depth
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.digits[i * self.depth..(i + 1) * self.depth]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.digits.chunks_exact(self.depth)
    }
}

/// Injective map from the columns `0..len` to rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PartialPermutation {
    assignments: Vec<usize>,
}

impl PartialPermutation {
    pub fn new(assignments: Vec<usize>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(assignments.len());
        if let Some(&dup) = assignments.iter().find(|&&i| !seen.insert(i)) {
            return Err(Error::InvalidPermutation(dup));
        }
        Ok(PartialPermutation { assignments })
    }

    /// Columns assigned so far.
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn get(&self, column: usize) -> Option<usize> {
        self.assignments.get(column).copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignments
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.len());
        self.assignments.iter().all(|i| seen.insert(*i))
    }

    /// The word `a[pi(0)][0] a[pi(1)][1] ...` over the assigned columns.
    pub fn diagonal(&self, rows: &PrefixList) -> Word {
        Word::new(self.assignments.iter().enumerate().map(|(j, &i)| rows.row(i)[j]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreedyRun {
    pub permutation: PartialPermutation,
    pub diagonal: Word,
    /// All `depth` columns were assigned.
    pub completed: bool,
    pub depth: usize,
}

/// Column by column, the least unused row whose digit matches the target.
/// Stops at the first column without a candidate.
pub fn greedy_diagonal_permutation(rows: &PrefixList, target: &Word) -> Result<GreedyRun> {
    let depth = rows.depth();
    if target.len() != depth {
        return Err(Error::DimensionMismatch {
            expected: depth,
            found: target.len(),
        });
    }
    let mut used = HashSet::new();
    let mut assignments = Vec::with_capacity(depth);
    for (j, &x) in target.symbols().iter().enumerate() {
        match (0..rows.len()).find(|i| rows.row(*i)[j] == x && !used.contains(i)) {
            Some(i) => {
                used.insert(i);
                assignments.push(i);
            }
            None => break,
        }
    }
    let permutation = PartialPermutation { assignments };
    let diagonal = permutation.diagonal(rows);
    debug_assert_eq!(diagonal.symbols(), &target.symbols()[..permutation.len()]);
    Ok(GreedyRun {
        completed: permutation.len() == depth,
        diagonal,
        permutation,
        depth,
    })
}

/// One step of the block construction: rows and columns `start..=split`
/// form a block, row `start` goes to column `split`, the rest shift left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub start: usize,
    /// First position at or after `start` where row `start` differs from the avoided word.
    pub split: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AvoidRun {
    pub permutation: PartialPermutation,
    pub diagonal: Word,
    /// Block `k` makes the diagonal differ from avoided word `k` at `split`.
    pub blocks: Vec<Block>,
    /// Some avoided word could not be handled within the depth or the rows.
    pub exhausted: bool,
}

/// Builds a diagonal differing from every avoided word, block by block; once
/// the list is used up the remaining columns take the identity.
pub fn avoid_list_permutation(rows: &PrefixList, avoid: &PrefixList) -> Result<AvoidRun> {
    let depth = rows.depth();
    if !avoid.is_empty() && avoid.depth() != depth {
        return Err(Error::DimensionMismatch {
            expected: depth,
            found: avoid.depth(),
        });
    }
    let limit = depth.min(rows.len());
    let mut assignments = Vec::with_capacity(limit);
    let mut blocks = Vec::with_capacity(avoid.len());
    let mut exhausted = false;
    let mut start = 0;
    for t in avoid.rows() {
        let split = (start < limit)
            .then(|| (start..limit).find(|&p| rows.row(start)[p] != t[p]))
            .flatten();
        let Some(split) = split else {
            exhausted = true;
            break;
        };
        assignments.extend(start + 1..=split);
        assignments.push(start);
        blocks.push(Block { start, split });
        start = split + 1;
    }
    if !exhausted {
        assignments.extend(start..limit);
    }
    let permutation = PartialPermutation { assignments };
    let diagonal = permutation.diagonal(rows);
    Ok(AvoidRun {
        permutation,
        diagonal,
        blocks,
        exhausted,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    /// `counts[d]`: occurrences of digit `d`.
    pub counts: Vec<usize>,
    /// Length of the longest constant suffix.
    pub constant_tail: usize,
}

pub fn digit_census(word: &Word, s: usize) -> Result<Census> {
    let alphabet = Alphabet::new(s)?;
    let mut counts = vec![0; s];
    for &d in word.symbols() {
        if !alphabet.contains(d) {
            return Err(Error::SymbolOutOfRange {
                symbol: d.to_string(),
                size: s,
            });
        }
        counts[d as usize] += 1;
    }
    let symbols = word.symbols();
    let constant_tail = match symbols.last() {
        None => 0,
        Some(&last) => symbols.iter().rev().take_while(|&&d| d == last).count(),
    };
    Ok(Census { counts, constant_tail })
}

/// Depth-`depth` prefixes of the base-`s` expansions of every rational
/// `r/q` in `[0, 1)` with `q <= max_den`, in `(q, r)` order. With `double`,
/// a terminating expansion is followed by its twin ending in `s - 1`
/// repeated, and `1 = 0.(s-1)(s-1)...` is included.
pub fn rational_corpus(depth: usize, max_den: u64, s: usize, double: bool) -> Result<PrefixList> {
    let alphabet = Alphabet::new(s)?;
    let mut list = PrefixList::new(alphabet, depth)?;
    let base = s as u64;
    let mut digits = Vec::new();
    for q in 1..=max_den {
        for r in 0..q {
            if r.gcd(&q) != 1 {
                continue;
            }
            // Expand to `depth` digits, and with `double` on until the
            // remainder vanishes so the last nonzero digit is known.
            digits.clear();
            let mut rem = r;
            let full = double && terminates(q, base);
            while digits.len() < depth || (full && rem != 0) {
                digits.push((rem * base / q) as u8);
                rem = rem * base % q;
            }
            list.push(&digits[..depth])?;
            if double && r > 0 && rem == 0 {
                let last = digits.iter().rposition(|&d| d != 0).expect("nonzero rational");
                let mut twin = digits.clone();
                twin[last] -= 1;
                twin.resize(depth.max(last + 1), 0);
                for d in &mut twin[last + 1..] {
                    *d = (s - 1) as u8;
                }
                list.push(&twin[..depth])?;
            }
        }
        if double && q == 1 {
            list.push(&vec![(s - 1) as u8; depth])?;
        }
    }
    Ok(list)
}

/// Whether `1/q` has a finite expansion in base `base`.
fn terminates(mut q: u64, base: u64) -> bool {
    loop {
        let g = q.gcd(&base);
        if g == 1 {
            return q == 1;
        }
        q /= g;
    }
}

/// Eventually periodic words `u v v v ...` with `|u| <= max_preperiod` and
/// `1 <= |v| <= max_period`, each infinite word once, truncated to `depth`.
pub fn periodic_corpus(depth: usize, max_preperiod: usize, max_period: usize, s: usize) -> Result<PrefixList> {
    let alphabet = Alphabet::new(s)?;
    if max_period == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let mut list = PrefixList::new(alphabet, depth)?;
    // Two such words agreeing on this many digits agree everywhere.
    let key_len = max_preperiod + 2 * max_period;
    let mut seen = HashSet::new();
    let mut word = Vec::new();
    for a in 0..=max_preperiod {
        for b in 1..=max_period {
            let combos = (s as u64).checked_pow((a + b) as u32).ok_or(Error::CapExceeded {
                n: a + b,
                cap: 64,
            })?;
            for code in 0..combos {
                let mut c = code;
                let mut seed: Vec<u8> = (0..a + b)
                    .map(|_| {
                        let d = (c % s as u64) as u8;
                        c /= s as u64;
                        d
                    })
                    .collect();
                seed.reverse();
                let (u, v) = seed.split_at(a);
                word.clear();
                word.extend_from_slice(u);
                while word.len() < depth.max(key_len) {
                    word.push(v[(word.len() - a) % b]);
                }
                if seen.insert(word[..key_len].to_vec()) {
                    list.push(&word[..depth])?;
                }
            }
        }
    }
    Ok(list)
}
