//! Monte Carlo estimates of the Cantorian fraction for random tableaux, the
//! Hamiltonian-digraph route to non-Cantorian rows, and sweeps across the
//! transition near `s ~ n / log n`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cantorian::{is_cantorian, Witness};
use crate::graph::{hamiltonian_cycle, Digraph, HamiltonConfig, HamiltonOutcome};
use crate::rng::{trial_rng, RNG_NAME};
use crate::{Alphabet, Error, Result, Tableau};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Tableau with i.i.d. uniform entries.
pub fn sample_random_tableau<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R) -> Result<Tableau> {
    let alphabet = Alphabet::new(s)?;
    let cells = (0..n * n).map(|_| rng.gen_range(0..s) as u8).collect();
    Tableau::from_cells(n, alphabet, cells)
}

/// Wilson score interval at 95%.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if hits == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub n: usize,
    pub s: usize,
    pub trials: u64,
    pub hits: u64,
    pub fraction: f64,
    pub wilson_interval_95: (f64, f64),
    pub seed: u64,
    pub rng: &'static str,
}

impl Estimate {
    fn new(n: usize, s: usize, trials: u64, hits: u64, seed: u64) -> Self {
        Estimate {
            n,
            s,
            trials,
            hits,
            fraction: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
            wilson_interval_95: wilson_interval(hits, trials),
            seed,
            rng: RNG_NAME,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.wilson_interval_95.0 <= value && value <= self.wilson_interval_95.1
    }
}

fn check_trials(n: usize, s: usize, trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    Alphabet::new(s).map(|_| ())
}

/// Fraction of random `n x n` tableaux over `s` letters that are Cantorian.
pub fn estimate_cantorian_fraction(n: usize, s: usize, trials: u64, seed: u64) -> Result<Estimate> {
    check_trials(n, s, trials)?;
    let hits = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let t = sample_random_tableau(n, s, &mut trial_rng(seed, trial)).expect("valid shape");
            is_cantorian(&t).is_cantorian as u64
        })
        .sum();
    Ok(Estimate::new(n, s, trials, hits, seed))
}

/// Digraph on rows `0..n-1` with an arc `i -> j` (`i != j`) when row `i`
/// agrees with the last row in column `j`.
pub fn last_row_digraph(t: &Tableau) -> Digraph {
    let n = t.n();
    let m = n.saturating_sub(1);
    let last = t.row(n - 1);
    Digraph::from_edges(
        m,
        (0..m).flat_map(|i| (0..m).filter(move |&j| i != j && t.get(i, j) == last[j]).map(move |j| (i, j))),
    )
}

/// Permutation (column to row) reading the last row along a Hamiltonian
/// cycle of [`last_row_digraph`]: column `succ(i)` takes row `i`, and the
/// last column takes the last row.
pub fn witness_from_cycle(n: usize, cycle: &[usize]) -> Witness {
    let mut permutation = vec![n - 1; n];
    for (idx, &i) in cycle.iter().enumerate() {
        let succ = cycle[(idx + 1) % cycle.len()];
        permutation[succ] = i;
    }
    Witness { row: n - 1, permutation }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HamiltonEstimate {
    /// Hits are samples with a Hamiltonian digraph.
    pub estimate: Estimate,
    /// Samples the search gave up on; counted as misses.
    pub undecided: u64,
    /// Hamiltonian samples whose witness validated and which `is_cantorian` rejected.
    pub confirmed: u64,
    /// Hamiltonian samples where either check failed. Always 0 unless there is a bug.
    pub violations: u64,
}

/// Fraction of random tableaux whose [`last_row_digraph`] is Hamiltonian.
/// Each positive is audited: the witness built from the cycle must validate
/// and the tableau must be reported non-Cantorian.
pub fn hamiltonian_witness_fraction(
    n: usize,
    s: usize,
    trials: u64,
    seed: u64,
    config: &HamiltonConfig,
) -> Result<HamiltonEstimate> {
    check_trials(n, s, trials)?;
    if n < 2 {
        return Err(Error::InvalidArgument("the digraph needs n >= 2".into()));
    }
    let (hits, undecided, confirmed, violations) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let t = sample_random_tableau(n, s, &mut trial_rng(seed, trial)).expect("valid shape");
            match hamiltonian_cycle(&last_row_digraph(&t), config) {
                HamiltonOutcome::Cycle { cycle, .. } => {
                    let ok = witness_from_cycle(n, &cycle).validates(&t) && !is_cantorian(&t).is_cantorian;
                    (1, 0, ok as u64, !ok as u64)
                }
                HamiltonOutcome::NoCycle { .. } => (0, 0, 0, 0),
                HamiltonOutcome::Undecided { .. } => (0, 1, 0, 0),
            }
        })
        .reduce(|| (0, 0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3));
    Ok(HamiltonEstimate {
        estimate: Estimate::new(n, s, trials, hits, seed),
        undecided,
        confirmed,
        violations,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "natural" | "ln" => Ok(LogBase::Natural),
            "2" | "two" => Ok(LogBase::Two),
            "10" | "ten" => Ok(LogBase::Ten),
            other => Err(Error::InvalidArgument(format!("unknown log base {other:?}"))),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        })
    }
}

/// Free parameters of the transition bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdParams {
    /// Slack in the lower bound; `None` means `sqrt(log n)`.
    pub r_n: Option<f64>,
    pub epsilon: f64,
    pub log_base: LogBase,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        ThresholdParams {
            r_n: None,
            epsilon: 0.1,
            log_base: LogBase::Natural,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub n: usize,
    pub r_n: f64,
    pub epsilon: f64,
    /// Below `n / (log n + log log n + r_n)` random tableaux are almost never Cantorian.
    pub lower: f64,
    /// Above `n / (log n - log log n - epsilon)` they almost always are;
    /// infinite when the denominator is not positive.
    pub upper: f64,
}

impl ThresholdParams {
    pub fn thresholds(&self, n: usize) -> Thresholds {
        let ln = self.log_base.log(n as f64);
        let lnln = self.log_base.log(ln);
        let r_n = self.r_n.unwrap_or_else(|| ln.max(0.0).sqrt());
        let lower = n as f64 / (ln + lnln + r_n);
        let d = ln - lnln - self.epsilon;
        Thresholds {
            n,
            r_n,
            epsilon: self.epsilon,
            lower,
            upper: if d > 0.0 { n as f64 / d } else { f64::INFINITY },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Below,
    Between,
    Above,
}

impl Thresholds {
    pub fn regime(&self, s: usize) -> Regime {
        let s = s as f64;
        if s < self.lower {
            Regime::Below
        } else if s > self.upper {
            Regime::Above
        } else {
            Regime::Between
        }
    }

    /// Largest alphabet strictly below the lower bound, if at least 2.
    pub fn s_below(&self) -> Option<usize> {
        let s = self.lower.ceil() as usize - 1;
        (s >= 2).then_some(s)
    }

    /// Smallest alphabet strictly above the upper bound.
    pub fn s_above(&self) -> Option<usize> {
        self.upper.is_finite().then(|| self.upper.floor() as usize + 1)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Below => "below",
            Regime::Between => "between",
            Regime::Above => "above",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SStrategy {
    /// One alphabet just below the lower bound and one just above the upper.
    Thresholds,
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub s: usize,
    pub regime: Regime,
    pub estimate: Estimate,
    pub r_n: f64,
    pub epsilon: f64,
    pub log_base: LogBase,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: &'static str,
    pub rows: Vec<SweepRow>,
    /// Per `n`: whether every below-regime fraction is under every
    /// above-regime fraction; `None` when one side is missing.
    pub ordered: Vec<(usize, Option<bool>)>,
}

/// Estimates the Cantorian fraction on both sides of the transition.
/// Trial streams are keyed by `(n, s)` so rows are independent of the order.
pub fn phase_sweep(
    n_list: &[usize],
    strategy: &SStrategy,
    trials: u64,
    seed: u64,
    params: &ThresholdParams,
) -> Result<SweepReport> {
    let mut rows = Vec::new();
    let mut ordered = Vec::new();
    for &n in n_list {
        let th = params.thresholds(n);
        let alphabets: Vec<usize> = match strategy {
            SStrategy::Thresholds => th.s_below().into_iter().chain(th.s_above()).collect(),
            SStrategy::Explicit(list) => list.clone(),
        };
        let mut below = Vec::new();
        let mut above = Vec::new();
        for s in alphabets {
            let row_seed = seed ^ ((n as u64) << 32 | s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let estimate = estimate_cantorian_fraction(n, s, trials, row_seed)?;
            let regime = th.regime(s);
            match regime {
                Regime::Below => below.push(estimate.fraction),
                Regime::Above => above.push(estimate.fraction),
                Regime::Between => {}
            }
            rows.push(SweepRow {
                n,
                s,
                regime,
                estimate,
                r_n: th.r_n,
                epsilon: th.epsilon,
                log_base: params.log_base,
            });
        }
        let check = (!below.is_empty() && !above.is_empty())
            .then(|| below.iter().all(|b| above.iter().all(|a| b < a)));
        ordered.push((n, check));
    }
    Ok(SweepReport {
        schema: crate::SCHEMA,
        rows,
        ordered,
    })
}

pub const SWEEP_CSV_HEADER: [&str; 12] = [
    "n", "s", "regime", "trials", "hits", "fraction", "ci_lo", "ci_hi", "seed", "r_n", "epsilon", "log_base",
];

/// Writes sweep rows as CSV with a header line.
pub fn sweep_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(SWEEP_CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        let e = &r.estimate;
        w.write_record([
            r.n.to_string(),
            r.s.to_string(),
            r.regime.to_string(),
            e.trials.to_string(),
            e.hits.to_string(),
            e.fraction.to_string(),
            e.wilson_interval_95.0.to_string(),
            e.wilson_interval_95.1.to_string(),
            e.seed.to_string(),
            r.r_n.to_string(),
            r.epsilon.to_string(),
            r.log_base.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831).abs() < 1e-5 && (hi - 0.596_169).abs() < 1e-5);
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_53).abs() < 1e-4);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_random_tableau(6, 3, &mut trial_rng(5, 2)).unwrap();
        let b = sample_random_tableau(6, 3, &mut trial_rng(5, 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            estimate_cantorian_fraction(3, 2, 500, 9).unwrap(),
            estimate_cantorian_fraction(3, 2, 500, 9).unwrap()
        );
        assert!(estimate_cantorian_fraction(3, 2, 0, 9).is_err());
    }

    #[test]
    fn thresholds_at_100() {
        let th = ThresholdParams::default().thresholds(100);
        assert!((th.lower - 12.08).abs() < 0.01, "{}", th.lower);
        assert!((th.upper - 33.58).abs() < 0.01, "{}", th.upper);
        assert_eq!(th.s_below(), Some(12));
        assert_eq!(th.s_above(), Some(34));
        assert_eq!(th.regime(12), Regime::Below);
        assert_eq!(th.regime(20), Regime::Between);
        assert_eq!(th.regime(34), Regime::Above);
    }

    #[test]
    fn witness_from_cycle_reads_last_row() {
        // Rows 0, 1 agree with the last row off the diagonal.
        let t = Tableau::parse("010\n100\n110", Alphabet::BINARY).unwrap();
        let d = last_row_digraph(&t);
        assert!(d.has_edge(0, 1) && d.has_edge(1, 0));
        let w = witness_from_cycle(3, &[0, 1]);
        assert_eq!(w.permutation, vec![1, 0, 2]);
        assert!(w.validates(&t));
    }

    #[test]
    fn csv_layout() {
        let r = phase_sweep(&[2], &SStrategy::Explicit(vec![2]), 100, 1, &ThresholdParams::default()).unwrap();
        let text = sweep_to_csv(&r.rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER.join(","));
        assert!(lines.next().unwrap().starts_with("2,2,"));
    }
}
