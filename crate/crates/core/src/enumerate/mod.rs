//! Exact counts of Cantorian tableaux.
//!
//! Three methods are available for `C(n, s)`:
//!
//! * `brute` enumerates every tableau (optionally with the skeleton filter on
//!   the last row, which is exact and much faster);
//! * `normalized` (binary only) fixes one row to all ones by column flips and
//!   multiplies by `2^n`;
//! * `last_column` (binary only) additionally enumerates only the first
//!   `n - 1` columns and counts the last column by parity constraints.
//!
//! `c(n, p)` counts binary tableaux with exactly `p` cells equal to 1.

mod engine;
pub mod last_column;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cantorian::is_cantorian;
use crate::cantorian::small::{is_cantorian_bits, MAX_SMALL_N};
use crate::{Error, Result, Tableau, SCHEMA};
use engine::Space;
pub use last_column::{count_parity_solutions, last_column_constraints, last_column_count, ParityUnionFind};

/// Default cap on the number of tableau tests a count may perform.
pub const DEFAULT_BUDGET: u128 = 10_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Normalized,
    LastColumn,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "normalized" => Ok(Method::Normalized),
            "last_column" | "last-column" => Ok(Method::LastColumn),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Normalized => "normalized",
            Method::LastColumn => "last_column",
        })
    }
}

/// Shard `index` of `of`; work units are split by residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Shard {
    pub index: usize,
    pub of: usize,
}

impl Shard {
    pub const WHOLE: Shard = Shard { index: 0, of: 1 };

    pub fn new(index: usize, of: usize) -> Result<Self> {
        if of == 0 || index >= of {
            return Err(Error::InvalidArgument(format!("bad shard {index}/{of}")));
        }
        Ok(Shard { index, of })
    }
}

impl FromStr for Shard {
    type Err = Error;

    /// Parses `i/m`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("shard must look like i/m, got {s:?}"));
        let (i, m) = s.split_once('/').ok_or_else(bad)?;
        Shard::new(i.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShardInfo {
    pub index: usize,
    pub of: usize,
    /// Work units in the whole space; this shard holds those congruent to `index`.
    pub units: u64,
}

/// Weight of a prefix under a canonical-form filter: 0 drops it, otherwise it
/// stands for that many prefixes. Rows are encoded as order-preserving keys
/// and the filter may only rely on symmetries that keep every count intact.
pub trait PrefixFilter: Send + Sync {
    fn weight(&self, rows: &[u64]) -> u64;
}

/// Keeps only prefixes with non-decreasing free rows, weighted by the number
/// of distinct orderings. Valid because permuting rows preserves the property.
#[derive(Clone, Copy, Debug, Default)]
pub struct SortedRows;

impl PrefixFilter for SortedRows {
    fn weight(&self, rows: &[u64]) -> u64 {
        if rows.windows(2).any(|w| w[0] > w[1]) {
            return 0;
        }
        let mut weight = factorial(rows.len());
        let mut run = 1;
        for i in 1..=rows.len() {
            if i < rows.len() && rows[i] == rows[i - 1] {
                run += 1;
            } else {
                weight /= factorial(run);
                run = 1;
            }
        }
        weight
    }
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

#[derive(Clone)]
pub struct CountOptions {
    pub jobs: usize,
    pub shard: Shard,
    pub budget: u128,
    /// Skeleton filter on the last row for `brute` and `normalized`.
    pub skeleton: bool,
    pub filter: Option<Arc<dyn PrefixFilter>>,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            shard: Shard::WHOLE,
            budget: DEFAULT_BUDGET,
            skeleton: true,
            filter: None,
        }
    }
}

impl fmt::Debug for CountOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountOptions")
            .field("jobs", &self.jobs)
            .field("shard", &self.shard)
            .field("budget", &self.budget)
            .field("skeleton", &self.skeleton)
            .field("filter", &self.filter.is_some())
            .finish()
    }
}

fn as_string<S: Serializer>(v: &BigUint, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&v.to_str_radix(10))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub schema: &'static str,
    pub n: usize,
    pub s: usize,
    /// Number of cells equal to 1, for occurrence counts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(serialize_with = "as_string")]
    pub count: BigUint,
    pub method: Method,
    pub elapsed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shards: Option<ShardInfo>,
}

impl CountReport {
    /// `count / s^n` when that is exact, the usual way of writing these counts.
    pub fn coefficient(&self) -> Option<BigUint> {
        let base = BigUint::from(self.s).pow(self.n as u32);
        (&self.count % &base).is_zero().then(|| &self.count / &base)
    }

    /// `count / s^(n^2)`.
    pub fn proportion(&self) -> f64 {
        let total = BigUint::from(self.s).pow((self.n * self.n) as u32);
        ratio(&self.count, &total)
    }
}

fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().saturating_sub(60);
    let a = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (b >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}

fn check_budget(needed: Option<u128>, budget: u128) -> Result<()> {
    match needed {
        Some(needed) if needed <= budget => Ok(()),
        Some(needed) => Err(Error::BudgetExceeded { needed, budget }),
        None => Err(Error::BudgetExceeded {
            needed: u128::MAX,
            budget,
        }),
    }
}

fn pow(s: usize, e: usize) -> Option<u128> {
    (s as u128).checked_pow(e as u32)
}

/// Exact `C(n, s)`.
pub fn count_cantorian(n: usize, s: usize, method: Method, options: &CountOptions) -> Result<CountReport> {
    let start = Instant::now();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !(2..=256).contains(&s) {
        return Err(Error::InvalidAlphabet(s));
    }
    if method != Method::Brute && s != 2 {
        return Err(Error::NotBinary(s));
    }
    let needed = match method {
        Method::Brute => pow(s, n * n),
        Method::Normalized => pow(2, n * (n - 1)),
        Method::LastColumn => pow(2, (n - 1) * (n - 1)),
    };
    check_budget(needed, options.budget)?;
    if n > MAX_SMALL_N {
        return Err(Error::CapExceeded { n, cap: MAX_SMALL_N });
    }
    let report = |count: BigUint, shards: Option<ShardInfo>| CountReport {
        schema: SCHEMA,
        n,
        s,
        p: None,
        count,
        method,
        elapsed: start.elapsed().as_secs_f64(),
        shards,
    };
    // A single cell always reads its own row.
    if n == 1 {
        return Ok(report(BigUint::zero(), None));
    }
    let shard_info = |units: u64| (options.shard != Shard::WHOLE).then_some(ShardInfo {
        index: options.shard.index,
        of: options.shard.of,
        units,
    });
    let filter = options.filter.as_deref();
    match method {
        Method::Brute | Method::Normalized => {
            let space = Space {
                n,
                s,
                // Row order is immaterial, so the all-ones row is placed first.
                fixed_rows: if method == Method::Normalized { vec![vec![1; n]] } else { Vec::new() },
                skeleton: options.skeleton,
                histogram: false,
                filter,
            };
            let (tally, units) = space.run(options.shard, options.jobs);
            let mut count = BigUint::from(tally.count);
            if method == Method::Normalized {
                count <<= n;
            }
            Ok(report(count, shard_info(units)))
        }
        Method::LastColumn => {
            let (count, units) = last_column_total(n, options);
            Ok(report(count << n, shard_info(units)))
        }
    }
}

/// Sum of last-column counts over all prefixes whose last row is all ones.
fn last_column_total(n: usize, options: &CountOptions) -> (BigUint, u64) {
    let w = n - 1;
    let free = w * w;
    let target = 64 * options.shard.of as u64;
    let c = (0..=free).find(|&c| 1u64 << c >= target).unwrap_or(free);
    let units: Vec<u64> = (0..1u64 << c)
        .filter(|u| u % options.shard.of as u64 == options.shard.index as u64)
        .collect();
    let filter = options.filter.as_deref();
    let work = || {
        units
            .par_iter()
            .map(|&u| {
                let mut counter = last_column::LastColumnCounter::new(n);
                let mut rows = vec![0u64; n];
                rows[w] = (1 << w) - 1;
                let mut keys = vec![0u64; w];
                let mut total: u128 = 0;
                for hi in 0..1u64 << (free - c) {
                    let p = hi << c | u;
                    for (i, row) in rows.iter_mut().enumerate().take(w) {
                        *row = p >> (i * w) & ((1 << w) - 1);
                    }
                    let weight = match filter {
                        None => 1,
                        Some(f) => {
                            keys.copy_from_slice(&rows[..w]);
                            f.weight(&keys)
                        }
                    };
                    if weight > 0 {
                        total += weight as u128 * counter.count(&rows) as u128;
                    }
                }
                total
            })
            .sum::<u128>()
    };
    let total = match rayon::ThreadPoolBuilder::new().num_threads(options.jobs.max(1)).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };
    (BigUint::from(total), 1u64 << c)
}

/// Exact `c(n, p)` by enumerating the placements of the rarer letter.
pub fn count_by_occurrences(n: usize, p: usize) -> Result<CountReport> {
    count_by_occurrences_with(n, p, &CountOptions::default())
}

pub fn count_by_occurrences_with(n: usize, p: usize, options: &CountOptions) -> Result<CountReport> {
    let start = Instant::now();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let cells = n * n;
    if p > cells {
        return Err(Error::InvalidArgument(format!("p = {p} exceeds n^2 = {cells}")));
    }
    if cells > 64 {
        return Err(Error::CapExceeded { n, cap: 8 });
    }
    // Complementing every cell preserves the property and maps p to n^2 - p.
    let q = p.min(cells - p);
    check_budget(Some(binomial(cells, q)), options.budget)?;
    let row_mask = (1u64 << n) - 1;
    let test = |mask: u64| {
        let rows: Vec<u64> = (0..n).map(|i| mask >> (i * n) & row_mask).collect();
        is_cantorian_bits(n, &rows)
    };
    let count: u64 = if q == 0 {
        test(0) as u64
    } else {
        // Split by the lowest occupied cell.
        let work = || {
            (0..=cells - q)
                .into_par_iter()
                .map(|low| {
                    let rest = cells - low - 1;
                    combinations(rest, q - 1)
                        .filter(|&m| test(1 << low | m << (low + 1)))
                        .count() as u64
                })
                .sum()
        };
        match rayon::ThreadPoolBuilder::new().num_threads(options.jobs.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        }
    };
    Ok(CountReport {
        schema: SCHEMA,
        n,
        s: 2,
        p: Some(p),
        count: BigUint::from(count),
        method: Method::Brute,
        elapsed: start.elapsed().as_secs_f64(),
        shards: None,
    })
}

/// All `k`-subsets of `0..m` as bit masks, in increasing order.
fn combinations(m: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = if m >= 64 { u64::MAX } else { 1u64 << m };
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut next = (k <= m).then_some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n = (((r ^ cur) >> 2) / c) | r;
            (r != 0 && n < limit).then_some(n)
        };
        Some(cur)
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `c(n, p)` for every `p`, from one exhaustive pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OccurrenceTable {
    pub schema: &'static str,
    pub n: usize,
    /// `counts[p] = c(n, p)`.
    pub counts: Vec<u64>,
    pub total: u64,
}

pub fn occurrence_table(n: usize, options: &CountOptions) -> Result<OccurrenceTable> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    check_budget(pow(2, n * n), options.budget)?;
    if n == 1 {
        return Ok(OccurrenceTable {
            schema: SCHEMA,
            n,
            counts: vec![0, 0],
            total: 0,
        });
    }
    let space = Space {
        n,
        s: 2,
        fixed_rows: Vec::new(),
        skeleton: options.skeleton,
        histogram: true,
        filter: options.filter.as_deref(),
    };
    let (tally, _) = space.run(Shard::WHOLE, options.jobs);
    let mut counts = tally.histogram;
    counts.resize(n * n + 1, 0);
    Ok(OccurrenceTable {
        schema: SCHEMA,
        n,
        total: tally.count,
        counts,
    })
}

/// One closed-form case checked against an exhaustive count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem6Case {
    pub p: usize,
    pub expected: u64,
    pub observed: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem6Report {
    pub schema: &'static str,
    pub n: usize,
    pub cases: Vec<Theorem6Case>,
    /// Whether the tableau with `n - 2` rows of 0, one row `0..0111` and one
    /// row of 1 is Cantorian (it has `n + 3` ones); `None` for `n < 3`.
    pub witness_cantorian: Option<bool>,
    pub all_hold: bool,
}

/// Closed forms for few occurrences: `c(n, p) = 0` for `p < n`, `c(n, n) = n`
/// for `n >= 3`, `c(n, n + 1) = 0` for `n >= 4`, `c(n, n + 2) = 0` for
/// `n >= 5`; plus a Cantorian tableau with `n + 3` ones.
pub fn theorem6_check(n: usize, options: &CountOptions) -> Result<Theorem6Report> {
    let mut expected: Vec<(usize, u64)> = (0..n).map(|p| (p, 0)).collect();
    if n >= 3 {
        expected.push((n, n as u64));
    }
    if n >= 4 {
        expected.push((n + 1, 0));
    }
    if n >= 5 {
        expected.push((n + 2, 0));
    }
    let mut cases = Vec::with_capacity(expected.len());
    for (p, want) in expected {
        let got = count_by_occurrences_with(n, p, options)?
            .count
            .to_u64()
            .expect("small count");
        cases.push(Theorem6Case {
            p,
            expected: want,
            observed: got,
            holds: got == want,
        });
    }
    let witness_cantorian = if n >= 3 {
        Some(is_cantorian(&remark_witness(n)?).is_cantorian)
    } else {
        None
    };
    let all_hold = cases.iter().all(|c| c.holds) && witness_cantorian != Some(false);
    Ok(Theorem6Report {
        schema: SCHEMA,
        n,
        cases,
        witness_cantorian,
        all_hold,
    })
}

/// `n - 2` rows of 0, then `0^(n-3) 111`, then `1^n`.
pub fn remark_witness(n: usize) -> Result<Tableau> {
    if !(3..=256).contains(&n) {
        return Err(Error::InvalidArgument(format!("witness needs n >= 3, got {n}")));
    }
    let mut rows = vec![vec![0u8; n]; n - 2];
    let mut tail = vec![0u8; n];
    tail[n - 3..].fill(1);
    rows.push(tail);
    rows.push(vec![1; n]);
    Tableau::from_rows(crate::Alphabet::BINARY, rows)
}

/// `log2(C(n)) / n^2` for a binary count.
pub fn log_ratio(count: &BigUint, n: usize) -> f64 {
    if count.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = count.bits();
    let shift = bits.saturating_sub(53);
    let mantissa = (count >> shift).to_f64().unwrap_or(f64::INFINITY);
    (mantissa.log2() + shift as f64) / (n * n) as f64
}

/// Number of binary `n x n` tableaux that are not Cantorian.
pub fn non_cantorian(count: &BigUint, n: usize) -> BigUint {
    (BigUint::one() << (n * n)) - count
}
