use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::json;

use cantoria::asymptotics::{self, LogBase, SStrategy, ThresholdParams};
use cantoria::cantorian::{self, is_bi_cantorian, is_cantorian, is_cantorian_by_definition};
use cantoria::diagonal::{self, PrefixList};
use cantoria::enumerate::{self, CountOptions, Method, Shard, SortedRows};
use cantoria::graph::HamiltonConfig;
use cantoria::permanent::{perm_set_with_cap, PermMethod, DEFAULT_PERM_CAP};
use cantoria::rng::trial_rng;
use cantoria::{Alphabet, Tableau, Word, SCHEMA};

#[derive(Parser, Debug)]
#[command(name = "cantoria", version, about = "Set permanents and Cantorian tableaux")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for count and sample (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on the number of tableau tests an exhaustive count may perform.
    #[arg(long, global = true, default_value_t = enumerate::DEFAULT_BUDGET)]
    budget: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a tableau is Cantorian (exit 0 yes, 1 no, 2 error).
    Check(InputArgs),
    /// List the set permanent of a small tableau.
    Perm {
        #[command(flatten)]
        input: InputArgs,
        /// Largest n accepted.
        #[arg(long, default_value_t = DEFAULT_PERM_CAP)]
        cap: usize,
    },
    /// Count Cantorian tableaux exactly.
    Count(CountArgs),
    /// Estimate the Cantorian fraction of random tableaux.
    Sample(SampleArgs),
    /// Estimate the fraction on both sides of the transition thresholds.
    Sweep(SweepArgs),
    /// Run the diagonal constructions on a truncated infinite tableau.
    Diagonalize(DiagonalArgs),
    /// Exhaustive small-case oracle checks and known-count spot checks.
    Selftest,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Tableau file (rows as lines, or the JSON form); standard input if absent or "-".
    file: Option<PathBuf>,
    /// Alphabet size; inferred from the content if absent.
    #[arg(long)]
    s: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Brute,
    Normalized,
    LastColumn,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Brute => Method::Brute,
            MethodArg::Normalized => Method::Normalized,
            MethodArg::LastColumn => Method::LastColumn,
        }
    }
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Count by the number of cells equal to 1 (binary only), for every p.
    #[arg(long)]
    by_p: bool,
    /// Count only tableaux with exactly this many cells equal to 1.
    #[arg(long, conflicts_with = "by_p")]
    p: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
    method: MethodArg,
    /// Run only shard i of m, written i/m.
    #[arg(long)]
    shard: Option<Shard>,
    /// Disable the last-row skeleton filter.
    #[arg(long)]
    no_skeleton: bool,
    /// Enumerate only prefixes with sorted rows, weighted by their orderings.
    #[arg(long)]
    sorted_rows: bool,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Estimate the fraction with a Hamiltonian last-row digraph instead.
    #[arg(long)]
    hamilton: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Comma-separated alphabet sizes; default: one on each side of the thresholds.
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Slack in the lower threshold (default: sqrt(log n)).
    #[arg(long)]
    r_n: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Logarithm base: e, 2 or 10.
    #[arg(long, default_value = "e")]
    log_base: LogBase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Corpus {
    Rationals,
    Periodic,
    File,
}

#[derive(Args, Debug)]
struct DiagonalArgs {
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Corpus::Rationals)]
    corpus: Corpus,
    /// Rows for `--corpus file`, one word per line.
    #[arg(long, required_if_eq("corpus", "file"))]
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Largest denominator of the rational corpus (default: s^depth, at most 4096).
    #[arg(long)]
    max_den: Option<u64>,
    /// Keep a single expansion for terminating rationals.
    #[arg(long)]
    no_double: bool,
    /// Longest pre-period and period of the periodic corpus.
    #[arg(long, default_value_t = 2)]
    preperiod: usize,
    #[arg(long, default_value_t = 3)]
    period: usize,
    /// Word to realize as a diagonal; random (from --seed) if absent.
    #[arg(long)]
    target: Option<String>,
    /// Words to avoid, one per line; runs the avoid-list construction.
    #[arg(long)]
    avoid_file: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(jobs) = cli.jobs {
        // Sampling uses the global pool; counts build their own.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let mut out = io::stdout().lock();
    match &cli.command {
        Command::Check(input) => check(cli, input, &mut out),
        Command::Perm { input, cap } => perm(cli, input, *cap, &mut out),
        Command::Count(args) => count(cli, args, &mut out),
        Command::Sample(args) => sample(cli, args, &mut out),
        Command::Sweep(args) => sweep(cli, args, &mut out),
        Command::Diagonalize(args) => diagonalize(cli, args, &mut out),
        Command::Selftest => selftest(cli, &mut out),
    }
}

fn read_source(path: Option<&Path>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        }
        _ => {
            io::stdin().read_to_string(&mut text).context("reading standard input")?;
        }
    }
    Ok(text)
}

fn read_tableau(input: &InputArgs) -> Result<Tableau> {
    let text = read_source(input.file.as_deref())?;
    let t = if text.trim_start().starts_with('{') {
        let t = Tableau::from_json(&text)?;
        if let Some(s) = input.s {
            if s != t.alphabet().size() {
                bail!("--s {s} disagrees with the file's alphabet size {}", t.alphabet().size());
            }
        }
        t
    } else {
        match input.s {
            Some(s) => Tableau::parse(&text, Alphabet::new(s)?)?,
            None => Tableau::parse_infer(&text)?,
        }
    };
    Ok(t)
}

fn print_json(out: &mut impl Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn check(cli: &Cli, input: &InputArgs, out: &mut impl Write) -> Result<u8> {
    let t = read_tableau(input)?;
    let report = cantorian::criteria_report(&t);
    let verdict = &report.verdict;
    let bi = verdict.is_cantorian && is_bi_cantorian(&t);
    let mut fired = Vec::new();
    if report.sparse_letter.is_some() {
        fired.push("sparse_letter");
    }
    if report.complement_pairing.is_some() {
        fired.push("complement_pairing");
    }
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "schema": SCHEMA,
                "n": t.n(),
                "s": t.alphabet().size(),
                "cantorian": verdict.is_cantorian,
                "bi_cantorian": bi,
                "witness": verdict.witness,
                "sparse_letter": report.sparse_letter,
                "complement_pairing": report.complement_pairing,
                "criteria": fired,
            }),
        )?,
        Format::Csv => {
            writeln!(out, "n,s,cantorian,bi_cantorian,witness_row,criteria")?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                t.n(),
                t.alphabet().size(),
                verdict.is_cantorian,
                bi,
                verdict.witness.as_ref().map_or(String::new(), |w| w.row.to_string()),
                fired.join(";")
            )?;
        }
        Format::Text => {
            writeln!(out, "{}", if verdict.is_cantorian { "cantorian" } else { "not cantorian" })?;
            if let Some(w) = &verdict.witness {
                writeln!(
                    out,
                    "witness: row {} = {} read with rows {:?} in columns 0..{}",
                    w.row,
                    t.row_word(w.row).to_text(t.alphabet()),
                    w.permutation,
                    t.n()
                )?;
            }
            if let Some(a) = report.sparse_letter {
                writeln!(out, "criterion: letter {a} fills at least n^2 - n + 1 cells")?;
            }
            if let Some(p) = &report.complement_pairing {
                writeln!(out, "criterion: every row has a row differing in all columns {p:?}")?;
            }
            if bi {
                writeln!(out, "bi-cantorian: no column word is a permuted diagonal either")?;
            }
        }
    }
    Ok(if verdict.is_cantorian { 0 } else { 1 })
}

fn perm(cli: &Cli, input: &InputArgs, cap: usize, out: &mut impl Write) -> Result<u8> {
    let t = read_tableau(input)?;
    let set = perm_set_with_cap(&t, PermMethod::Brute, cap)?;
    let words: Vec<String> = set.iter().map(|w| w.to_text(t.alphabet())).collect();
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({"schema": SCHEMA, "n": t.n(), "s": t.alphabet().size(), "size": words.len(), "words": words}),
        )?,
        Format::Csv => {
            writeln!(out, "word")?;
            for w in &words {
                writeln!(out, "{w}")?;
            }
        }
        Format::Text => {
            writeln!(out, "|Perm(T)| = {}", words.len())?;
            for w in &words {
                writeln!(out, "{w}")?;
            }
        }
    }
    Ok(0)
}

fn count_options(cli: &Cli, args: &CountArgs) -> CountOptions {
    let mut options = CountOptions {
        budget: cli.budget,
        skeleton: !args.no_skeleton,
        shard: args.shard.unwrap_or(Shard::WHOLE),
        ..CountOptions::default()
    };
    if let Some(jobs) = cli.jobs {
        options.jobs = jobs;
    }
    if args.sorted_rows {
        options.filter = Some(Arc::new(SortedRows));
    }
    options
}

fn count(cli: &Cli, args: &CountArgs, out: &mut impl Write) -> Result<u8> {
    let options = count_options(cli, args);
    if args.by_p {
        if args.s != 2 {
            bail!("--by-p needs --s 2");
        }
        let table = enumerate::occurrence_table(args.n, &options)?;
        match cli.format {
            Format::Json => print_json(out, &table)?,
            Format::Csv => {
                writeln!(out, "n,p,count")?;
                for (p, c) in table.counts.iter().enumerate() {
                    writeln!(out, "{},{p},{c}", table.n)?;
                }
            }
            Format::Text => {
                writeln!(out, "{:>4} {:>12}", "p", "c(n,p)")?;
                for (p, c) in table.counts.iter().enumerate() {
                    writeln!(out, "{p:>4} {c:>12}")?;
                }
                writeln!(out, "{:>4} {:>12}", "sum", table.total)?;
            }
        }
        return Ok(0);
    }
    let report = match args.p {
        Some(p) => {
            if args.s != 2 {
                bail!("--p needs --s 2");
            }
            enumerate::count_by_occurrences_with(args.n, p, &options)?
        }
        None => enumerate::count_cantorian(args.n, args.s, args.method.into(), &options)?,
    };
    match cli.format {
        Format::Json => print_json(out, &report)?,
        Format::Csv => {
            writeln!(out, "n,s,p,count,coefficient,proportion,method,elapsed")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                report.n,
                report.s,
                report.p.map_or(String::new(), |p| p.to_string()),
                report.count,
                report.coefficient().map_or(String::new(), |c| c.to_string()),
                report.proportion(),
                report.method,
                report.elapsed
            )?;
        }
        Format::Text => {
            writeln!(out, "{}", report.count)?;
            if report.p.is_none() {
                if let Some(c) = report.coefficient() {
                    writeln!(out, "= {c} * {}^{}", report.s, report.n)?;
                }
                writeln!(out, "proportion {:.3e}", report.proportion())?;
            }
            if let Some(sh) = &report.shards {
                writeln!(out, "shard {}/{} of {} units (partial count)", sh.index, sh.of, sh.units)?;
            }
            writeln!(out, "method {} in {:.3}s", report.method, report.elapsed)?;
        }
    }
    Ok(0)
}

fn sample(cli: &Cli, args: &SampleArgs, out: &mut impl Write) -> Result<u8> {
    let (estimate, extra) = if args.hamilton {
        let h = asymptotics::hamiltonian_witness_fraction(args.n, args.s, args.trials, cli.seed, &HamiltonConfig::default())?;
        let extra = json!({"undecided": h.undecided, "confirmed": h.confirmed, "violations": h.violations});
        (h.estimate, Some(extra))
    } else {
        (asymptotics::estimate_cantorian_fraction(args.n, args.s, args.trials, cli.seed)?, None)
    };
    let (lo, hi) = estimate.wilson_interval_95;
    match cli.format {
        Format::Json => {
            let mut v = json!({"schema": SCHEMA, "kind": if args.hamilton { "hamiltonian" } else { "cantorian" }, "estimate": estimate});
            if let Some(extra) = extra {
                v["audit"] = extra;
            }
            print_json(out, &v)?;
        }
        Format::Csv => {
            writeln!(out, "n,s,trials,hits,fraction,ci_lo,ci_hi,seed")?;
            writeln!(
                out,
                "{},{},{},{},{},{lo},{hi},{}",
                estimate.n, estimate.s, estimate.trials, estimate.hits, estimate.fraction, estimate.seed
            )?;
        }
        Format::Text => {
            writeln!(
                out,
                "{} of {} ({}) in [{lo}, {hi}] seed {}",
                estimate.hits, estimate.trials, estimate.fraction, estimate.seed
            )?;
            if let Some(extra) = extra {
                writeln!(out, "audit {extra}")?;
            }
        }
    }
    Ok(0)
}

fn sweep(cli: &Cli, args: &SweepArgs, out: &mut impl Write) -> Result<u8> {
    let params = ThresholdParams {
        r_n: args.r_n,
        epsilon: args.epsilon,
        log_base: args.log_base,
    };
    let strategy = if args.s.is_empty() {
        SStrategy::Thresholds
    } else {
        SStrategy::Explicit(args.s.clone())
    };
    let report = asymptotics::phase_sweep(&args.n, &strategy, args.trials, cli.seed, &params)?;
    match cli.format {
        Format::Json => print_json(out, &report)?,
        Format::Csv => write!(out, "{}", asymptotics::sweep_to_csv(&report.rows)?)?,
        Format::Text => {
            writeln!(out, "{:>5} {:>5} {:>8} {:>9} {:>20}", "n", "s", "regime", "fraction", "95% interval")?;
            for r in &report.rows {
                let (lo, hi) = r.estimate.wilson_interval_95;
                writeln!(
                    out,
                    "{:>5} {:>5} {:>8} {:>9.4} {:>9.4} .. {:<9.4}",
                    r.n, r.s, r.regime, r.estimate.fraction, lo, hi
                )?;
            }
            for (n, ok) in &report.ordered {
                let text = match ok {
                    Some(true) => "ordered",
                    Some(false) => "NOT ordered",
                    None => "no pair to compare",
                };
                writeln!(out, "n={n}: {text}")?;
            }
        }
    }
    Ok(0)
}

fn read_words(path: &Path, alphabet: Alphabet, depth: usize) -> Result<PrefixList> {
    let text = read_source(Some(path))?;
    let mut list = PrefixList::new(alphabet, depth)?;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let w = Word::parse(line, alphabet)?;
        if w.len() < depth {
            bail!("word {line:?} is shorter than the depth {depth}");
        }
        list.push(&w.symbols()[..depth])?;
    }
    Ok(list)
}

fn diagonalize(cli: &Cli, args: &DiagonalArgs, out: &mut impl Write) -> Result<u8> {
    let alphabet = Alphabet::new(args.s)?;
    let rows = match args.corpus {
        Corpus::Rationals => {
            let default = (args.s as u64).checked_pow(args.depth as u32).unwrap_or(u64::MAX).min(4096);
            diagonal::rational_corpus(args.depth, args.max_den.unwrap_or(default), args.s, !args.no_double)?
        }
        Corpus::Periodic => diagonal::periodic_corpus(args.depth, args.preperiod, args.period, args.s)?,
        Corpus::File => read_words(args.file.as_deref().context("--file is required")?, alphabet, args.depth)?,
    };
    if let Some(path) = &args.avoid_file {
        let avoid = read_words(path, alphabet, args.depth)?;
        let run = diagonal::avoid_list_permutation(&rows, &avoid)?;
        let census = diagonal::digit_census(&run.diagonal, args.s)?;
        match cli.format {
            Format::Json => print_json(
                out,
                &json!({"schema": SCHEMA, "construction": "avoid", "rows": rows.len(), "run": run,
                        "diagonal_text": run.diagonal.to_text(alphabet), "census": census}),
            )?,
            _ => {
                writeln!(out, "rows {} depth {}", rows.len(), args.depth)?;
                writeln!(out, "pi {:?}", run.permutation.as_slice())?;
                writeln!(out, "diagonal {}", run.diagonal.to_text(alphabet))?;
                writeln!(out, "blocks {}", run.blocks.len())?;
                writeln!(out, "exhausted {}", run.exhausted)?;
                writeln!(out, "census {:?} constant tail {}", census.counts, census.constant_tail)?;
            }
        }
        return Ok(0);
    }
    let target = match &args.target {
        Some(t) => Word::parse(t, alphabet)?,
        None => {
            let mut rng = trial_rng(cli.seed, 0);
            Word::new((0..args.depth).map(|_| rng.gen_range(0..args.s) as u8).collect())
        }
    };
    let run = diagonal::greedy_diagonal_permutation(&rows, &target)?;
    let census = diagonal::digit_census(&run.diagonal, args.s)?;
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({"schema": SCHEMA, "construction": "greedy", "rows": rows.len(),
                    "target": target.to_text(alphabet), "run": run,
                    "diagonal_text": run.diagonal.to_text(alphabet), "census": census}),
        )?,
        _ => {
            writeln!(out, "rows {} depth {}", rows.len(), args.depth)?;
            writeln!(out, "target {}", target.to_text(alphabet))?;
            writeln!(out, "pi {:?}", run.permutation.as_slice())?;
            writeln!(out, "diagonal {}", run.diagonal.to_text(alphabet))?;
            writeln!(out, "completed {} ({} of {} columns)", run.completed, run.permutation.len(), args.depth)?;
            writeln!(out, "census {:?} constant tail {}", census.counts, census.constant_tail)?;
        }
    }
    Ok(0)
}

fn selftest(cli: &Cli, out: &mut impl Write) -> Result<u8> {
    let mut checks: Vec<(String, bool)> = Vec::new();
    let agree = |n: usize, s: usize| -> Result<bool> {
        let a = Alphabet::new(s)?;
        let total = s.pow((n * n) as u32);
        for code in 0..total {
            let mut c = code;
            let cells = (0..n * n)
                .map(|_| {
                    let d = (c % s) as u8;
                    c /= s;
                    d
                })
                .collect();
            let t = Tableau::from_cells(n, a, cells)?;
            if is_cantorian(&t).is_cantorian != is_cantorian_by_definition(&t)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    checks.push(("matching = definition, binary 3x3".into(), agree(3, 2)?));
    checks.push(("matching = definition, ternary 2x2".into(), agree(2, 3)?));
    let mut options = CountOptions {
        budget: cli.budget,
        ..CountOptions::default()
    };
    if let Some(jobs) = cli.jobs {
        options.jobs = jobs;
    }
    for (n, s, method, want) in [
        (2, 2, Method::Brute, 4u64),
        (3, 2, Method::Brute, 24),
        (4, 2, Method::LastColumn, 1744),
        (2, 3, Method::Brute, 36),
        (3, 3, Method::Brute, 5076),
    ] {
        let got = enumerate::count_cantorian(n, s, method, &options)?.count;
        checks.push((format!("C({n},{s}) = {want}"), got == want.into()));
    }
    let row = enumerate::occurrence_table(3, &options)?;
    checks.push(("c(3,p) row".into(), row.counts == [0, 0, 0, 3, 9, 9, 3, 0, 0, 0]));
    let ok = checks.iter().all(|(_, pass)| *pass);
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({"schema": SCHEMA, "ok": ok,
                    "checks": checks.iter().map(|(name, pass)| json!({"name": name, "pass": pass})).collect::<Vec<_>>()}),
        )?,
        _ => {
            for (name, pass) in &checks {
                writeln!(out, "{} {name}", if *pass { "PASS" } else { "FAIL" })?;
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}
