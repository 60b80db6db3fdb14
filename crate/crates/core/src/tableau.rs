//! Tableau and word value types, the Cantorian-invariant transforms, and the
//! text/JSON formats.
//!
//! Rows and columns are 0-based in code. Symbols are the integers `0..s`;
//! the letters `a..z` are accepted on input as sugar for `0..26`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::permanent::WordSet;
use crate::{Error, Result, SCHEMA};

/// A finite alphabet `{0, 1, ..., s-1}` with `2 <= s <= 256`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(usize);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);

    pub fn new(size: usize) -> Result<Self> {
        if (2..=256).contains(&size) {
            Ok(Alphabet(size))
        } else {
            Err(Error::InvalidAlphabet(size))
        }
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    #[inline]
    pub fn contains(self, symbol: u8) -> bool {
        (symbol as usize) < self.0
    }

    /// Digits are written without separators when every symbol fits in one
    /// decimal digit.
    fn compact(self) -> bool {
        self.0 <= 10
    }

    fn check(self, symbol: u8) -> Result<u8> {
        if self.contains(symbol) {
            Ok(symbol)
        } else {
            Err(Error::SymbolOutOfRange {
                symbol: symbol.to_string(),
                size: self.0,
            })
        }
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;
    fn try_from(size: usize) -> Result<Self> {
        Alphabet::new(size)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.0
    }
}

/// A non-empty sequence of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    /// Wraps raw symbols without alphabet validation.
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn checked(symbols: Vec<u8>, alphabet: Alphabet) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &c in &symbols {
            alphabet.check(c)?;
        }
        Ok(Word(symbols))
    }

    /// Parses a word in the same token syntax as a tableau row.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self> {
        let symbols = tokenize_line(text.trim())?
            .into_iter()
            .map(|c| alphabet.check(c).map_err(|_| out_of_range(c, alphabet)))
            .collect::<Result<Vec<_>>>()?;
        Word::checked(symbols, alphabet)
    }

    #[inline]
    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_symbols(self) -> Vec<u8> {
        self.0
    }

    /// Applies a symbol map letter by letter.
    pub fn map(&self, f: &[u8]) -> Word {
        Word(self.0.iter().map(|&c| f[c as usize]).collect())
    }

    pub fn to_text(&self, alphabet: Alphabet) -> String {
        render_row(&self.0, alphabet)
    }
}

impl From<&[u8]> for Word {
    fn from(s: &[u8]) -> Self {
        Word(s.to_vec())
    }
}

/// An `n x n` grid of symbols; entry `(i, j)` is row `i`, column `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    alphabet: Alphabet,
    cells: Vec<u8>,
    /// Row bit masks (bit `j` = column `j`) when `s = 2` and `n <= 64`.
    packed: Option<Vec<u64>>,
}

impl Tableau {
    pub fn from_rows(alphabet: Alphabet, rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    found: row.len(),
                    expected: n,
                });
            }
            cells.extend(row);
        }
        Self::from_cells(n, alphabet, cells)
    }

    /// Builds a tableau from row-major cells.
    pub fn from_cells(n: usize, alphabet: Alphabet, cells: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if cells.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: cells.len(),
            });
        }
        for &c in &cells {
            alphabet.check(c)?;
        }
        let packed = (alphabet.size() == 2 && n <= 64).then(|| {
            cells
                .chunks(n)
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .fold(0u64, |m, (j, &c)| m | ((c as u64) << j))
                })
                .collect()
        });
        Ok(Tableau {
            n,
            alphabet,
            cells,
            packed,
        })
    }

    /// Builds a binary tableau from row masks (bit `j` of `rows[i]` is entry `(i, j)`).
    pub fn from_bit_rows(n: usize, rows: &[u64]) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.len(),
            });
        }
        let cells = rows
            .iter()
            .flat_map(|&r| (0..n).map(move |j| ((r >> j) & 1) as u8))
            .collect();
        Self::from_cells(n, Alphabet::BINARY, cells)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.n + col]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.cells[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.cells.chunks(self.n)
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    #[inline]
    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// Packed row mask, available for binary tableaux with `n <= 64`.
    #[inline]
    pub fn packed_row(&self, i: usize) -> Option<u64> {
        self.packed.as_ref().map(|p| p[i])
    }

    pub fn row_word(&self, i: usize) -> Word {
        Word(self.row(i).to_vec())
    }

    /// The sequence of row-words, duplicates kept.
    pub fn row_words(&self) -> Vec<Word> {
        self.rows().map(|r| Word(r.to_vec())).collect()
    }

    pub fn column_words(&self) -> Vec<Word> {
        (0..self.n).map(|j| Word(self.column(j))).collect()
    }

    /// The set of distinct row-words.
    pub fn row_set(&self) -> WordSet {
        WordSet::from_words(self.n, self.row_words())
    }

    /// Occurrences of each symbol, indexed by symbol.
    pub fn letter_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.alphabet.size()];
        for &c in &self.cells {
            counts[c as usize] += 1;
        }
        counts
    }

    /// Parses `n` lines of `n` symbol tokens.
    ///
    /// A line without whitespace is read one character per symbol; a line
    /// containing whitespace is split into tokens, each a decimal number or a
    /// single letter. Blank lines are ignored.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self> {
        let rows = parse_rows(text)?;
        for row in &rows {
            for &c in row {
                alphabet.check(c).map_err(|_| out_of_range(c, alphabet))?;
            }
        }
        Self::from_rows(alphabet, rows)
    }

    /// Parses with the alphabet size inferred as `max(2, largest symbol + 1)`.
    pub fn parse_infer(text: &str) -> Result<Self> {
        let rows = parse_rows(text)?;
        let max = rows.iter().flatten().copied().max().unwrap_or(0) as usize;
        Self::from_rows(Alphabet::new((max + 1).max(2))?, rows)
    }

    /// Canonical text form: one line per row, digits for `s <= 10`,
    /// space-separated numbers otherwise.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            out.push_str(&render_row(row, self.alphabet));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> TableauJson {
        TableauJson {
            schema: Some(SCHEMA.to_string()),
            n: self.n,
            s: self.alphabet.size(),
            rows: self.rows().map(|r| render_row(r, self.alphabet)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("tableau json is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: TableauJson =
            serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        Self::try_from(value)
    }

    /// Applies one transform, returning a new tableau.
    pub fn apply(&self, transform: &Transform) -> Result<Tableau> {
        let n = self.n;
        let s = self.alphabet.size();
        let cells = match transform {
            Transform::RowPermutation(p) => {
                check_permutation(p, n)?;
                p.iter().flat_map(|&src| self.row(src).iter().copied()).collect()
            }
            Transform::ColumnPermutation(p) => {
                check_permutation(p, n)?;
                (0..n)
                    .flat_map(|i| p.iter().map(move |&src| (i, src)))
                    .map(|(i, src)| self.get(i, src))
                    .collect()
            }
            Transform::ColumnBijection { column, map } => {
                if *column >= n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: *column,
                    });
                }
                check_bijection(map, s)?;
                let mut cells = self.cells.clone();
                for i in 0..n {
                    let c = &mut cells[i * n + column];
                    *c = map[*c as usize];
                }
                cells
            }
        };
        Tableau::from_cells(n, self.alphabet, cells)
    }

    /// Applies transforms left to right.
    pub fn apply_all<'a>(&self, transforms: impl IntoIterator<Item = &'a Transform>) -> Result<Tableau> {
        transforms
            .into_iter()
            .try_fold(self.clone(), |t, tr| t.apply(tr))
    }

    /// Flips every column whose last-row entry is 0, so the last row becomes
    /// all ones. Returns the normal form and the flipped-column mask.
    pub fn column_flip_normalize(&self) -> Result<(Tableau, Vec<bool>)> {
        if self.alphabet.size() != 2 {
            return Err(Error::NotBinary(self.alphabet.size()));
        }
        let n = self.n;
        let mask: Vec<bool> = self.row(n - 1).iter().map(|&c| c == 0).collect();
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(idx, &c)| if mask[idx % n] { 1 - c } else { c })
            .collect();
        Ok((Tableau::from_cells(n, self.alphabet, cells)?, mask))
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// JSON form `{"schema": "cantoria/1", "n": .., "s": .., "rows": ["010", ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub n: usize,
    pub s: usize,
    pub rows: Vec<String>,
}

impl TryFrom<TableauJson> for Tableau {
    type Error = Error;

    fn try_from(value: TableauJson) -> Result<Self> {
        let alphabet = Alphabet::new(value.s)?;
        let t = Tableau::parse(&value.rows.join("\n"), alphabet)?;
        if t.n() != value.n {
            return Err(Error::DimensionMismatch {
                expected: value.n,
                found: t.n(),
            });
        }
        Ok(t)
    }
}

/// The transforms under which the Cantorian property is invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// Output row `i` is input row `p[i]`.
    RowPermutation(Vec<usize>),
    /// Output column `j` is input column `p[j]`.
    ColumnPermutation(Vec<usize>),
    /// Replaces every entry `c` of `column` by `map[c]`.
    ColumnBijection { column: usize, map: Vec<u8> },
}

fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return Err(Error::InvalidPermutation(n));
        }
    }
    Ok(())
}

fn check_bijection(map: &[u8], s: usize) -> Result<()> {
    if map.len() != s {
        return Err(Error::InvalidBijection(s));
    }
    let mut seen = vec![false; s];
    for &x in map {
        if x as usize >= s || std::mem::replace(&mut seen[x as usize], true) {
            return Err(Error::InvalidBijection(s));
        }
    }
    Ok(())
}

fn out_of_range(c: u8, alphabet: Alphabet) -> Error {
    let symbol = if alphabet.size() <= 10 || c >= 26 {
        c.to_string()
    } else {
        format!("{} ({})", c, (b'a' + c) as char)
    };
    Error::SymbolOutOfRange {
        symbol,
        size: alphabet.size(),
    }
}

fn parse_rows(text: &str) -> Result<Vec<Vec<u8>>> {
    let rows: Vec<Vec<u8>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(tokenize_line)
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(rows)
}

fn tokenize_line(line: &str) -> Result<Vec<u8>> {
    if line.contains(char::is_whitespace) {
        line.split_whitespace().map(parse_token).collect()
    } else {
        line.chars().map(parse_char).collect()
    }
}

fn parse_char(c: char) -> Result<u8> {
    match c {
        '0'..='9' => Ok(c as u8 - b'0'),
        'a'..='z' => Ok(c as u8 - b'a'),
        _ => Err(Error::SymbolOutOfRange {
            symbol: c.to_string(),
            size: 0,
        }),
    }
}

fn parse_token(tok: &str) -> Result<u8> {
    let mut chars = tok.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => parse_char(c),
        _ => tok.parse::<u8>().map_err(|_| Error::SymbolOutOfRange {
            symbol: tok.to_string(),
            size: 0,
        }),
    }
}

fn render_row(row: &[u8], alphabet: Alphabet) -> String {
    if alphabet.compact() {
        row.iter().map(|&c| (b'0' + c) as char).collect()
    } else {
        row.iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
