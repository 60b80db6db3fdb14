//! The set permanent `Perm(T)`: every word `a[pi(0)][0] a[pi(1)][1] ...`
//! over permutations `pi` of the rows.

use std::collections::HashSet;

use crate::graph::{max_matching_from, BipartiteGraph};
use crate::{Alphabet, Error, Result, Tableau, Word};

/// Default largest `n` for which `perm_set` materializes the permanent.
pub const DEFAULT_PERM_CAP: usize = 10;

/// A sorted, deduplicated set of equal-length words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WordSet {
    word_len: usize,
    words: Vec<Word>,
}

impl WordSet {
    /// Sorts and deduplicates. Panics on ragged input.
    pub fn from_words(word_len: usize, mut words: Vec<Word>) -> Self {
        assert!(
            words.iter().all(|w| w.len() == word_len),
            "all words must have length {word_len}"
        );
        words.sort_unstable();
        words.dedup();
        WordSet { word_len, words }
    }

    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.binary_search(w).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Word> {
        self.words.iter()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn intersection(&self, other: &WordSet) -> WordSet {
        let words = self.words.iter().filter(|w| other.contains(w)).cloned().collect();
        WordSet {
            word_len: self.word_len,
            words,
        }
    }

    pub fn is_disjoint(&self, other: &WordSet) -> bool {
        !self.words.iter().any(|w| other.contains(w))
    }

    pub fn union(&self, other: &WordSet) -> WordSet {
        let mut words = self.words.clone();
        words.extend(other.words.iter().cloned());
        WordSet::from_words(self.word_len.max(other.word_len), words)
    }
}

impl<'a> IntoIterator for &'a WordSet {
    type Item = &'a Word;
    type IntoIter = std::slice::Iter<'a, Word>;
    fn into_iter(self) -> Self::IntoIter {
        self.words.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermMethod {
    /// Enumerate all `n!` permutations.
    Brute,
    /// Row-expansion recursion, deleting the first row at every level.
    Insertion,
}

/// The diagonal word `a[0][0] a[1][1] ... a[n-1][n-1]`.
pub fn diag(t: &Tableau) -> Word {
    Word::new((0..t.n()).map(|i| t.get(i, i)).collect())
}

pub fn perm_set(t: &Tableau, method: PermMethod) -> Result<WordSet> {
    perm_set_with_cap(t, method, DEFAULT_PERM_CAP)
}

pub fn perm_set_with_cap(t: &Tableau, method: PermMethod, cap: usize) -> Result<WordSet> {
    check_cap(t, cap)?;
    let codes = match method {
        PermMethod::Brute => brute_codes(t),
        PermMethod::Insertion => insertion_codes(t, 0),
    };
    Ok(decode_all(t, codes))
}

/// Expansion along row `deletion_row` at the top level:
/// `Perm(T)` is the union over columns `j` of the words of `Perm(T minus
/// row i, column j)` with `a[i][j]` inserted at position `j`.
pub fn perm_set_by_insertion(t: &Tableau, deletion_row: usize) -> Result<WordSet> {
    check_cap(t, DEFAULT_PERM_CAP)?;
    if deletion_row >= t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: deletion_row,
        });
    }
    Ok(decode_all(t, insertion_codes(t, deletion_row)))
}

/// Membership of `w` in `Perm(T)`: a perfect matching between rows and
/// columns using the edges `a[i][j] == w[j]`. The witness maps each column
/// `j` to the row placed there.
pub fn perm_contains(t: &Tableau, w: &Word) -> Result<Option<Vec<usize>>> {
    if w.len() != t.n() {
        return Err(Error::DimensionMismatch {
            expected: t.n(),
            found: w.len(),
        });
    }
    Ok(match_word(t, w.symbols(), &[]))
}

/// Matching core shared with the Cantorian test. `seed` is a warm start of
/// `(row, column)` pairs.
pub(crate) fn match_word(t: &Tableau, w: &[u8], seed: &[(usize, usize)]) -> Option<Vec<usize>> {
    let n = t.n();
    let mut g = BipartiteGraph::new(n, n);
    for i in 0..n {
        for (j, &c) in t.row(i).iter().enumerate() {
            if c == w[j] {
                g.add_edge(i, j);
            }
        }
    }
    max_matching_from(&g, seed).bottom_assignment()
}

/// `Perm(W)` for `m <= n` distinct words of length `n`: the union of the
/// permanents of every tableau that lists each word at least once (row order
/// is irrelevant, so one tableau per composition of `n` into `m` parts).
pub fn perm_of_word_set(words: &[Word], alphabet: Alphabet) -> Result<WordSet> {
    let m = words.len();
    let n = words.first().ok_or(Error::EmptyInput)?.len();
    for (k, w) in words.iter().enumerate() {
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.len(),
            });
        }
        if words[..k].contains(w) {
            return Err(Error::DuplicateWord(k));
        }
        Word::checked(w.symbols().to_vec(), alphabet)?;
    }
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "{m} words cannot fill a {n}x{n} tableau"
        )));
    }
    let mut all = Vec::new();
    for parts in compositions(n, m) {
        let rows = words
            .iter()
            .zip(&parts)
            .flat_map(|(w, &k)| std::iter::repeat_n(w.symbols().to_vec(), k))
            .collect();
        let t = Tableau::from_rows(alphabet, rows)?;
        all.extend(perm_set(&t, PermMethod::Brute)?.words);
    }
    Ok(WordSet::from_words(n, all))
}

/// Compositions of `n` into `m` positive parts.
pub fn compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(left: usize, parts: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            acc.push(left);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for k in 1..=left - (parts - 1) {
            acc.push(k);
            go(left - k, parts - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if m >= 1 && n >= m {
        go(n, m, &mut Vec::new(), &mut out);
    }
    out
}

fn check_cap(t: &Tableau, cap: usize) -> Result<()> {
    let bits = (usize::BITS - (t.alphabet().size() - 1).leading_zeros()) as usize;
    if t.n() > cap || t.n() * bits > 127 || t.n() > 31 {
        return Err(Error::CapExceeded { n: t.n(), cap });
    }
    Ok(())
}

/// Words are packed base `s`, first symbol most significant, so numeric
/// order equals lexicographic order.
fn decode_all(t: &Tableau, mut codes: Vec<u128>) -> WordSet {
    codes.sort_unstable();
    codes.dedup();
    let n = t.n();
    let s = t.alphabet().size() as u128;
    let words = codes
        .into_iter()
        .map(|mut code| {
            let mut w = vec![0u8; n];
            for slot in w.iter_mut().rev() {
                *slot = (code % s) as u8;
                code /= s;
            }
            Word::new(w)
        })
        .collect();
    WordSet { word_len: n, words }
}

fn brute_codes(t: &Tableau) -> Vec<u128> {
    fn go(t: &Tableau, col: usize, used: u32, code: u128, out: &mut HashSet<u128>) {
        let n = t.n();
        if col == n {
            out.insert(code);
            return;
        }
        let s = t.alphabet().size() as u128;
        for row in 0..n {
            if used >> row & 1 == 0 {
                go(t, col + 1, used | 1 << row, code * s + t.get(row, col) as u128, out);
            }
        }
    }
    let mut out = HashSet::new();
    go(t, 0, 0, 0, &mut out);
    out.into_iter().collect()
}

fn insertion_codes(t: &Tableau, first_row: usize) -> Vec<u128> {
    let rows: Vec<usize> = std::iter::once(first_row)
        .chain((0..t.n()).filter(|&r| r != first_row))
        .collect();
    let cols: Vec<usize> = (0..t.n()).collect();
    expand(t, &rows, &cols)
}

/// Codes of `Perm` of the sub-tableau on `rows x cols`, expanding along `rows[0]`.
fn expand(t: &Tableau, rows: &[usize], cols: &[usize]) -> Vec<u128> {
    let s = t.alphabet().size() as u128;
    let (&row, rest) = rows.split_first().expect("non-empty sub-tableau");
    if cols.len() == 1 {
        return vec![t.get(row, cols[0]) as u128];
    }
    let mut out: Vec<u128> = Vec::new();
    for (pos, &col) in cols.iter().enumerate() {
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&c| c != col).collect();
        let after = s.pow((cols.len() - 1 - pos) as u32);
        let letter = t.get(row, col) as u128;
        out.extend(
            expand(t, rest, &sub_cols)
                .into_iter()
                .map(|code| ((code / after) * s + letter) * after + code % after),
        );
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(text: &str) -> Tableau {
        Tableau::parse(text, Alphabet::BINARY).unwrap()
    }

    fn w(text: &str) -> Word {
        Word::parse(text, Alphabet::BINARY).unwrap()
    }

    fn texts(set: &WordSet) -> Vec<String> {
        set.iter().map(|w| w.to_text(Alphabet::BINARY)).collect()
    }

    #[test]
    fn diagonal_words() {
        assert_eq!(diag(&bin("ab\nba")), w("aa"));
        assert_eq!(diag(&bin("ab\nab")), w("ab"));
        assert_eq!(diag(&bin("aba\nbab\nbbb")), w("aab"));
    }

    #[test]
    fn small_permanents() {
        let t = bin("ab\nba");
        for method in [PermMethod::Brute, PermMethod::Insertion] {
            assert_eq!(texts(&perm_set(&t, method).unwrap()), ["00", "11"]);
        }
        let t = bin("aba\nbab\nbbb");
        let p = perm_set(&t, PermMethod::Brute).unwrap();
        assert!(p.contains(&w("bbb")));
        assert_eq!(p, perm_set(&t, PermMethod::Insertion).unwrap());
        for i in 0..3 {
            assert_eq!(p, perm_set_by_insertion(&t, i).unwrap());
        }
        assert!(p.contains(&diag(&t)));
    }

    #[test]
    fn membership() {
        let t = bin("aba\nbab\nbbb");
        let pi = perm_contains(&t, &w("bbb")).unwrap().unwrap();
        for (col, &row) in pi.iter().enumerate() {
            assert_eq!(t.get(row, col), 1);
        }
        assert_eq!(perm_contains(&bin("ab\nba"), &w("ab")).unwrap(), None);
        assert!(perm_contains(&t, &w("ab")).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let n = 11;
        let t = Tableau::from_cells(n, Alphabet::BINARY, vec![0; n * n]).unwrap();
        assert_eq!(
            perm_set(&t, PermMethod::Brute),
            Err(Error::CapExceeded { n: 11, cap: 10 })
        );
        let small = bin("aba\nbab\nbbb");
        assert!(perm_set_with_cap(&small, PermMethod::Insertion, 2).is_err());
    }

    #[test]
    fn extended_permanent() {
        let a = Alphabet::BINARY;
        assert_eq!(texts(&perm_of_word_set(&[w("ab"), w("ba")], a).unwrap()), ["00", "11"]);
        assert_eq!(texts(&perm_of_word_set(&[w("ab")], a).unwrap()), ["01"]);

        // n = 3 from two words: brute force over the tableaux {x,x,y}, {x,y,y}.
        let x = [0u8, 1, 0];
        let y = [1u8, 0, 0];
        let mut expected = std::collections::BTreeSet::new();
        for rows in [[x, x, y], [x, y, y]] {
            for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                expected.insert((0..3).map(|j| rows[p[j]][j]).collect::<Vec<u8>>());
            }
        }
        let got = perm_of_word_set(&[Word::new(x.to_vec()), Word::new(y.to_vec())], a).unwrap();
        let got: Vec<Vec<u8>> = got.iter().map(|w| w.symbols().to_vec()).collect();
        assert_eq!(got, expected.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn extended_permanent_errors() {
        let a = Alphabet::BINARY;
        assert_eq!(perm_of_word_set(&[w("ab"), w("ab")], a), Err(Error::DuplicateWord(1)));
        assert!(perm_of_word_set(&[w("ab"), w("a")], a).is_err());
        assert!(perm_of_word_set(&[w("a"), w("b")], a).is_err());
        assert_eq!(perm_of_word_set(&[], a), Err(Error::EmptyInput));
    }

    #[test]
    fn composition_counts() {
        // C(n-1, m-1)
        assert_eq!(compositions(5, 2).len(), 4);
        assert_eq!(compositions(6, 3).len(), 10);
        assert_eq!(compositions(4, 4), vec![vec![1, 1, 1, 1]]);
        assert!(compositions(2, 3).is_empty());
    }
}
