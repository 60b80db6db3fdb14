//! Allocation-free Cantorian test for `n <= 16`, used by the enumerators.
//!
//! Row sets are `u16` masks; each column's adjacency in `G_k` is the set of
//! rows agreeing with row `k` in that column. Matching is Kuhn's augmenting
//! search, which at this size beats the phased algorithm.

pub const MAX_SMALL_N: usize = 16;

const NIL: u8 = u8::MAX;

/// Reusable checker for tableaux of one fixed shape.
#[derive(Clone, Debug)]
pub struct SmallChecker {
    n: usize,
    s: usize,
    /// `by_letter[j * s + a]`: rows holding `a` in column `j`.
    by_letter: Vec<u16>,
}

impl SmallChecker {
    pub fn new(n: usize, s: usize) -> Self {
        assert!((1..=MAX_SMALL_N).contains(&n), "small checker supports 1..=16 rows");
        SmallChecker {
            n,
            s,
            by_letter: vec![0; n * s],
        }
    }

    /// Cantorian test on row-major cells.
    pub fn is_cantorian(&mut self, cells: &[u8]) -> bool {
        let (n, s) = (self.n, self.s);
        debug_assert_eq!(cells.len(), n * n);
        self.by_letter.fill(0);
        for i in 0..n {
            for j in 0..n {
                self.by_letter[j * s + cells[i * n + j] as usize] |= 1 << i;
            }
        }
        let mut adj = [0u16; MAX_SMALL_N];
        for k in 0..n {
            let row = &cells[k * n..(k + 1) * n];
            if (0..k).any(|r| &cells[r * n..(r + 1) * n] == row) {
                continue;
            }
            for j in 0..n {
                adj[j] = self.by_letter[j * s + row[j] as usize];
            }
            if perfect_matching(&adj[..n]) {
                return false;
            }
        }
        true
    }
}

/// Cantorian test for a binary tableau given as row masks.
pub fn is_cantorian_bits(n: usize, rows: &[u64]) -> bool {
    debug_assert!(n <= MAX_SMALL_N && rows.len() == n);
    let full: u16 = if n == 16 { u16::MAX } else { (1u16 << n) - 1 };
    let mut ones = [0u16; MAX_SMALL_N];
    for (i, &r) in rows.iter().enumerate() {
        for (j, col) in ones.iter_mut().enumerate().take(n) {
            *col |= (((r >> j) & 1) as u16) << i;
        }
    }
    let mut adj = [0u16; MAX_SMALL_N];
    for k in 0..n {
        let row = rows[k];
        if rows[..k].contains(&row) {
            continue;
        }
        for j in 0..n {
            adj[j] = if (row >> j) & 1 == 1 { ones[j] } else { !ones[j] & full };
        }
        if perfect_matching(&adj[..n]) {
            return false;
        }
    }
    true
}

/// Whether the bipartite graph with `adj[col]` = allowed rows has a matching
/// covering every column; a perfect matching when rows and columns agree in number.
#[inline]
pub fn perfect_matching(adj: &[u16]) -> bool {
    let mut col_of_row = [NIL; MAX_SMALL_N];
    for j in 0..adj.len() {
        if adj[j] == 0 {
            return false;
        }
        let mut visited = 0u16;
        if !augment(adj, j, &mut visited, &mut col_of_row) {
            return false;
        }
    }
    true
}

/// Maximum matching saturating all columns, returned as `row_of_col`, or
/// `None` if some column cannot be matched.
pub fn column_saturating_matching(adj: &[u16]) -> Option<[u8; MAX_SMALL_N]> {
    let mut col_of_row = [NIL; MAX_SMALL_N];
    for j in 0..adj.len() {
        let mut visited = 0u16;
        if !augment(adj, j, &mut visited, &mut col_of_row) {
            return None;
        }
    }
    let mut row_of_col = [NIL; MAX_SMALL_N];
    for (r, &c) in col_of_row.iter().enumerate() {
        if c != NIL {
            row_of_col[c as usize] = r as u8;
        }
    }
    Some(row_of_col)
}

fn augment(adj: &[u16], col: usize, visited: &mut u16, col_of_row: &mut [u8; MAX_SMALL_N]) -> bool {
    let mut options = adj[col] & !*visited;
    while options != 0 {
        let r = options.trailing_zeros() as usize;
        options &= options - 1;
        *visited |= 1 << r;
        let owner = col_of_row[r];
        if owner == NIL || augment(adj, owner as usize, visited, col_of_row) {
            col_of_row[r] = col as u8;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_tiny_cases() {
        // ab/ba is Cantorian; aba/bab/bbb is not.
        assert!(is_cantorian_bits(2, &[0b10, 0b01]));
        assert!(!is_cantorian_bits(3, &[0b010, 0b101, 0b111]));
        let mut c = SmallChecker::new(2, 2);
        assert!(c.is_cantorian(&[0, 1, 1, 0]));
        assert!(!c.is_cantorian(&[0, 0, 0, 0]));
        assert!(!SmallChecker::new(1, 3).is_cantorian(&[2]));
    }

    #[test]
    fn saturating_matching() {
        // Three rows, two columns.
        let m = column_saturating_matching(&[0b011, 0b001]).unwrap();
        assert_eq!(m[1], 0);
        assert_eq!(m[0], 1);
        assert!(column_saturating_matching(&[0b001, 0b001]).is_none());
    }
}
