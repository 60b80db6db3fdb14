//! The exact Cantorian decision procedure and the sufficient and necessary
//! criteria around it.
//!
//! Row `k` lies in `Perm(T)` exactly when the bipartite graph `G_k` (rows x
//! columns, edge `(i, j)` iff `a[i][j] == a[k][j]`) has a perfect matching,
//! so the tableau is Cantorian iff no `G_k` has one.

pub mod small;

use serde::Serialize;

use crate::permanent::{match_word, perm_set, PermMethod, WordSet};
use crate::{Alphabet, Error, Result, Tableau, Word};

/// Evidence that a row is a permuted diagonal: `a[permutation[j]][j] ==
/// a[row][j]` for every column `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub row: usize,
    pub permutation: Vec<usize>,
}

impl Witness {
    /// Re-checks the witness by substitution.
    pub fn validates(&self, t: &Tableau) -> bool {
        let n = t.n();
        if self.row >= n || self.permutation.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        self.permutation.iter().enumerate().all(|(j, &i)| {
            i < n && !std::mem::replace(&mut seen[i], true) && t.get(i, j) == t.get(self.row, j)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub is_cantorian: bool,
    /// Present exactly when the tableau is not Cantorian.
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RowOrder {
    /// Rows in index order.
    Natural,
    /// Rows with fewer distinct letters first.
    #[default]
    Diversity,
}

pub fn is_cantorian(t: &Tableau) -> Verdict {
    is_cantorian_with(t, RowOrder::default())
}

/// One matching per distinct row. The edge `(k, n-1)` is always present in
/// `G_k` and seeds the matching.
pub fn is_cantorian_with(t: &Tableau, order: RowOrder) -> Verdict {
    let n = t.n();
    let mut rows: Vec<usize> = (0..n).filter(|&k| !(0..k).any(|r| t.row(r) == t.row(k))).collect();
    if order == RowOrder::Diversity {
        rows.sort_by_key(|&k| distinct_letters(t.row(k)));
    }
    for k in rows {
        if let Some(permutation) = match_word(t, t.row(k), &[(k, n - 1)]) {
            return Verdict {
                is_cantorian: false,
                witness: Some(Witness { row: k, permutation }),
            };
        }
    }
    Verdict {
        is_cantorian: true,
        witness: None,
    }
}

fn distinct_letters(row: &[u8]) -> usize {
    let mut seen = [false; 256];
    row.iter().filter(|&&c| !std::mem::replace(&mut seen[c as usize], true)).count()
}

/// Definition-level test: materializes `Perm(T)` and intersects it with the
/// row set. Only for `n <= 10`.
pub fn is_cantorian_by_definition(t: &Tableau) -> Result<bool> {
    Ok(perm_set(t, PermMethod::Brute)?.is_disjoint(&t.row_set()))
}

/// A letter occurring at least `n^2 - n + 1` times forces `a^n` into both the
/// row set and the permanent, so the tableau is not Cantorian. `None` says
/// nothing.
pub fn sparse_letter_check(t: &Tableau) -> Option<u8> {
    let n = t.n();
    let threshold = n * n - n + 1;
    t.letter_counts()
        .iter()
        .position(|&c| c >= threshold)
        .map(|a| a as u8)
}

/// One fixed-point-free map per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaFamily {
    alphabet: Alphabet,
    maps: Vec<Vec<u8>>,
}

impl SigmaFamily {
    pub fn new(alphabet: Alphabet, maps: Vec<Vec<u8>>) -> Result<Self> {
        let s = alphabet.size();
        for (index, map) in maps.iter().enumerate() {
            if map.len() != s {
                return Err(Error::DimensionMismatch {
                    expected: s,
                    found: map.len(),
                });
            }
            for (a, &b) in map.iter().enumerate() {
                if !alphabet.contains(b) {
                    return Err(Error::SymbolOutOfRange {
                        symbol: b.to_string(),
                        size: s,
                    });
                }
                if b as usize == a {
                    return Err(Error::FixedPoint { index, symbol: b });
                }
            }
        }
        Ok(SigmaFamily { alphabet, maps })
    }

    /// The letter swap on every row; the only admissible map when `s = 2`.
    pub fn binary_swap(n: usize) -> Self {
        SigmaFamily {
            alphabet: Alphabet::BINARY,
            maps: vec![vec![1, 0]; n],
        }
    }

    pub fn maps(&self) -> &[Vec<u8>] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// The tableau whose row `i` is `sigma_i` applied to row `i`.
    pub fn apply(&self, t: &Tableau) -> Result<Tableau> {
        self.check_shape(t)?;
        let rows = (0..t.n())
            .map(|i| t.row(i).iter().map(|&c| self.maps[i][c as usize]).collect())
            .collect();
        Tableau::from_rows(t.alphabet(), rows)
    }

    /// The set of distinct `sigma_i(l_i)`.
    pub fn image_rows(&self, t: &Tableau) -> Result<WordSet> {
        Ok(self.apply(t)?.row_set())
    }

    fn check_shape(&self, t: &Tableau) -> Result<()> {
        if self.maps.len() != t.n() {
            return Err(Error::DimensionMismatch {
                expected: t.n(),
                found: self.maps.len(),
            });
        }
        if self.alphabet != t.alphabet() {
            return Err(Error::DimensionMismatch {
                expected: t.alphabet().size(),
                found: self.alphabet.size(),
            });
        }
        Ok(())
    }
}

/// Largest `n` at which `sigma_condition` intersects materialized permanents.
const EXPLICIT_SIGMA_N: usize = 7;

/// Evaluates both disjointness statements for a fixed-point-free family:
/// `Perm(T)` misses every `sigma_i(l_i)`, and `Perm(sigma T)` misses every row.
/// Both components are expected to be `true`.
pub fn sigma_condition(t: &Tableau, family: &SigmaFamily) -> Result<(bool, bool)> {
    let sigma_t = family.apply(t)?;
    let sigma_rows = sigma_t.row_set();
    let rows = t.row_set();
    if t.n() <= EXPLICIT_SIGMA_N {
        let perm = perm_set(t, PermMethod::Brute)?;
        let sigma_perm = perm_set(&sigma_t, PermMethod::Brute)?;
        Ok((perm.is_disjoint(&sigma_rows), sigma_perm.is_disjoint(&rows)))
    } else {
        let first = sigma_rows.iter().all(|w| match_word(t, w.symbols(), &[]).is_none());
        let second = rows.iter().all(|w| match_word(&sigma_t, w.symbols(), &[]).is_none());
        Ok((first, second))
    }
}

/// Whether the family maps the row set onto itself; when it does the tableau
/// is Cantorian.
pub fn sigma_preserves_rows(t: &Tableau, family: &SigmaFamily) -> Result<bool> {
    Ok(family.image_rows(t)? == t.row_set())
}

/// For each row `i`, the first row `i'` that differs from it in every column.
/// A complete pairing proves the tableau Cantorian; `None` says nothing.
pub fn find_complement_pairing(t: &Tableau) -> Option<Vec<usize>> {
    let n = t.n();
    (0..n)
        .map(|i| {
            (0..n).find(|&k| t.row(i).iter().zip(t.row(k)).all(|(a, b)| a != b))
        })
        .collect()
}

/// Cantorian, and no column-word lies in `Perm(T)` either.
pub fn is_bi_cantorian(t: &Tableau) -> bool {
    is_cantorian(t).is_cantorian
        && (0..t.n()).all(|j| match_word(t, &t.column(j), &[]).is_none())
}

/// Binary `2m x 2m` tableau `[[A, !A], [!A, A]]` where `A` is the symmetric
/// block read from the upper triangle of `block` (row masks, bit `j` =
/// column `j`; entries below the diagonal are ignored).
///
/// Rows come in complementary pairs and every column equals a row, so the
/// result is always bi-Cantorian. There are `2^(m(m+1)/2)` such tableaux.
pub fn complement_block_tableau(m: usize, block: &[u64]) -> Result<Tableau> {
    if block.len() != m || m == 0 || m > 32 {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: block.len(),
        });
    }
    let low = (1u64 << m) - 1;
    let mut sym = vec![0u64; m];
    for i in 0..m {
        for j in i..m {
            if block[i] >> j & 1 == 1 {
                sym[i] |= 1 << j;
                sym[j] |= 1 << i;
            }
        }
    }
    let mut rows = Vec::with_capacity(2 * m);
    for &a in &sym {
        rows.push(a | ((!a & low) << m));
    }
    for &a in &sym {
        rows.push((!a & low) | (a << m));
    }
    Tableau::from_bit_rows(2 * m, &rows)
}

/// Which criteria fired on a tableau, for reporting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriteriaReport {
    pub verdict: Verdict,
    /// Letter occurring at least `n^2 - n + 1` times.
    pub sparse_letter: Option<u8>,
    /// Complement pairing, if every row has one.
    pub complement_pairing: Option<Vec<usize>>,
}

pub fn criteria_report(t: &Tableau) -> CriteriaReport {
    CriteriaReport {
        verdict: is_cantorian(t),
        sparse_letter: sparse_letter_check(t),
        complement_pairing: find_complement_pairing(t),
    }
}

/// The all-`letter` word of length `n`.
pub fn constant_word(n: usize, letter: u8) -> Word {
    Word::new(vec![letter; n])
}
