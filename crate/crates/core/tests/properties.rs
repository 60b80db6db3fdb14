use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use cantoria::asymptotics::{self, sample_random_tableau};
use cantoria::cantorian::{self, small::is_cantorian_bits, RowOrder};
use cantoria::diagonal;
use cantoria::enumerate::{self, CountOptions, Method, Shard, SortedRows};
use cantoria::permanent::{self, PermMethod};
use cantoria::rng::trial_rng;
use cantoria::{Alphabet, Tableau, Transform, Word};

fn tableau_strategy() -> impl Strategy<Value = Tableau> {
    (2usize..=6, 2usize..=3).prop_flat_map(|(n, s)| {
        prop::collection::vec(0..s as u8, n * n)
            .prop_map(move |cells| Tableau::from_cells(n, Alphabet::new(s).unwrap(), cells).unwrap())
    })
}

fn verdict(t: &Tableau) -> bool {
    cantorian::is_cantorian(t).is_cantorian
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn transforms_keep_the_verdict(t in tableau_strategy(), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let n = t.n();
        let s = t.alphabet().size();
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        let mut cols: Vec<usize> = (0..n).collect();
        cols.shuffle(&mut rng);
        let mut map: Vec<u8> = (0..s as u8).collect();
        map.shuffle(&mut rng);
        let moved = t
            .apply_all(&[
                Transform::RowPermutation(rows),
                Transform::ColumnPermutation(cols),
                Transform::ColumnBijection { column: rng.gen_range(0..n), map },
            ])
            .unwrap();
        prop_assert_eq!(verdict(&t), verdict(&moved));
    }

    #[test]
    fn witnesses_validate_and_row_order_is_irrelevant(t in tableau_strategy()) {
        let a = cantorian::is_cantorian_with(&t, RowOrder::Natural);
        let b = cantorian::is_cantorian_with(&t, RowOrder::Diversity);
        prop_assert_eq!(a.is_cantorian, b.is_cantorian);
        for v in [a, b] {
            prop_assert_eq!(v.is_cantorian, v.witness.is_none());
            if let Some(w) = v.witness {
                prop_assert!(w.validates(&t));
            }
        }
    }

    #[test]
    fn insertion_matches_brute(t in tableau_strategy().prop_filter("small", |t| t.n() <= 5)) {
        let brute = permanent::perm_set(&t, PermMethod::Brute).unwrap();
        prop_assert_eq!(permanent::perm_set(&t, PermMethod::Insertion).unwrap(), brute.clone());
        prop_assert!(brute.contains(&permanent::diag(&t)));
        for w in brute.iter().take(5) {
            prop_assert!(permanent::perm_contains(&t, w).unwrap().is_some());
        }
    }
}

#[test]
fn column_flips_normalize_the_last_row() {
    let mut rng = trial_rng(21, 0);
    for _ in 0..5000 {
        let n = rng.gen_range(2..=6);
        let t = sample_random_tableau(n, 2, &mut rng).unwrap();
        let (u, _) = t.column_flip_normalize().unwrap();
        assert!(u.row(n - 1).iter().all(|&c| c == 1));
        assert_eq!(verdict(&t), verdict(&u));
    }
}

#[test]
fn last_column_count_matches_completion() {
    let mut rng = trial_rng(22, 0);
    for k in 0..100_000 {
        let n = if k % 10 == 0 { rng.gen_range(2..=4) } else { 5 };
        let width = (1u64 << (n - 1)) - 1;
        let mut rows: Vec<u64> = (0..n - 1).map(|_| rng.gen::<u64>() & width).collect();
        rows.push(width);
        let mut oracle = 0;
        for col in 0..1u64 << (n - 1) {
            let full: Vec<u64> = (0..n)
                .map(|i| {
                    let bit = if i == n - 1 { 1 } else { col >> i & 1 };
                    rows[i] | bit << (n - 1)
                })
                .collect();
            oracle += is_cantorian_bits(n, &full) as u64;
        }
        assert_eq!(enumerate::last_column_count(n, &rows).unwrap(), oracle, "{rows:?}");
    }
}

#[test]
fn counting_methods_shards_and_filters_agree() {
    let base = CountOptions {
        jobs: 2,
        ..CountOptions::default()
    };
    for n in 2..=4 {
        let want = enumerate::count_cantorian(n, 2, Method::Brute, &base).unwrap().count;
        for method in [Method::Normalized, Method::LastColumn] {
            assert_eq!(enumerate::count_cantorian(n, 2, method, &base).unwrap().count, want);
        }
        let sorted = CountOptions {
            filter: Some(Arc::new(SortedRows)),
            ..base.clone()
        };
        assert_eq!(enumerate::count_cantorian(n, 2, Method::Normalized, &sorted).unwrap().count, want);
        for m in 1..=5 {
            let total: num_bigint::BigUint = (0..m)
                .map(|i| {
                    let o = CountOptions {
                        shard: Shard::new(i, m).unwrap(),
                        jobs: 1 + i % 2,
                        ..base.clone()
                    };
                    enumerate::count_cantorian(n, 2, Method::Brute, &o).unwrap().count
                })
                .sum();
            assert_eq!(total, want, "n={n} m={m}");
        }
    }
}

#[test]
fn sampled_letters_are_uniform() {
    // n = 50, s = 2: the share of ones is within 3 sigma of 1/2.
    let mut rng = trial_rng(23, 0);
    let t = sample_random_tableau(50, 2, &mut rng).unwrap();
    let ones = t.letter_counts()[1] as f64;
    let (m, sd) = (1250.0, (2500.0f64 * 0.25).sqrt());
    assert!((ones - m).abs() <= 3.0 * sd, "{ones}");

    // Chi-square over the 9 cells x 3 letters of 10^4 samples at n = 3, s = 3;
    // 18 degrees of freedom, critical value 42.312 at alpha = 0.001.
    let trials = 10_000;
    let mut counts = [[0u32; 3]; 9];
    for k in 0..trials {
        let t = sample_random_tableau(3, 3, &mut trial_rng(24, k)).unwrap();
        for (cell, &c) in t.cells().iter().enumerate() {
            counts[cell][c as usize] += 1;
        }
    }
    let e = trials as f64 / 3.0;
    let chi: f64 = counts.iter().flatten().map(|&o| (o as f64 - e).powi(2) / e).sum();
    assert!(chi < 42.312, "chi-square {chi}");
}

#[test]
fn sampling_is_reproducible() {
    let a = sample_random_tableau(7, 4, &mut trial_rng(9, 3)).unwrap();
    let b = sample_random_tableau(7, 4, &mut trial_rng(9, 3)).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let x = asymptotics::estimate_cantorian_fraction(3, 3, 3000, 4).unwrap();
    let y = asymptotics::estimate_cantorian_fraction(3, 3, 3000, 4).unwrap();
    assert_eq!(x, y);
}

#[test]
fn monte_carlo_covers_exact_fractions() {
    // Exact fractions from exhaustive counts. A 95% interval misses one case
    // in twenty, so the check here is a 4 sigma binomial band.
    let trials = 20_000;
    for (n, s, seed) in [(2usize, 3usize, 31u64), (3, 2, 32), (2, 4, 33), (3, 3, 34)] {
        let exact = enumerate::count_cantorian(n, s, Method::Brute, &CountOptions::default())
            .unwrap()
            .proportion();
        let e = asymptotics::estimate_cantorian_fraction(n, s, trials, seed).unwrap();
        let sd = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((e.fraction - exact).abs() <= 4.0 * sd, "({n},{s}) {} vs {exact}", e.fraction);
    }
}

#[test]
fn complement_blocks_are_bi_cantorian() {
    for m in 1..=4usize {
        let bits = m * (m + 1) / 2;
        let mut seen = std::collections::HashSet::new();
        for code in 0..1u64 << bits {
            let mut block = vec![0u64; m];
            let mut k = 0;
            for (i, row) in block.iter_mut().enumerate() {
                for j in i..m {
                    *row |= (code >> k & 1) << j;
                    k += 1;
                }
            }
            let t = cantorian::complement_block_tableau(m, &block).unwrap();
            assert!(cantorian::is_bi_cantorian(&t), "{}", t.to_text());
            assert!(cantorian::find_complement_pairing(&t).is_some());
            seen.insert(t.to_text());
        }
        assert_eq!(seen.len(), 1 << bits);
    }
}

#[test]
fn greedy_diagonals_avoid_rows_when_the_target_does() {
    let corpus = diagonal::rational_corpus(12, 64, 2, true).unwrap();
    let rows: std::collections::HashSet<&[u8]> = corpus.rows().collect();
    let mut rng = trial_rng(25, 0);
    let mut completed = 0;
    for _ in 0..2000 {
        let target = Word::new((0..12).map(|_| rng.gen_range(0..2)).collect());
        let run = diagonal::greedy_diagonal_permutation(&corpus, &target).unwrap();
        assert!(run.permutation.is_injective());
        assert_eq!(run.diagonal.symbols(), &target.symbols()[..run.permutation.len()]);
        if run.completed {
            completed += 1;
            if !rows.contains(target.symbols()) {
                assert!(!rows.contains(run.diagonal.symbols()));
            }
        }
        let again = diagonal::greedy_diagonal_permutation(&corpus, &target).unwrap();
        assert_eq!(run, again);
    }
    assert!(completed > 0);
}

#[test]
fn avoid_list_blocks_are_well_formed() {
    let a = Alphabet::BINARY;
    let rows = diagonal::PrefixList::from_words(
        a,
        &["0000", "1111", "0101", "1010"].map(|w| Word::parse(w, a).unwrap()),
    )
    .unwrap();
    let avoid = diagonal::PrefixList::from_words(a, &["0111", "1000"].map(|w| Word::parse(w, a).unwrap())).unwrap();
    let run = diagonal::avoid_list_permutation(&rows, &avoid).unwrap();
    assert!(!run.exhausted);
    for (k, b) in run.blocks.iter().enumerate() {
        assert_ne!(run.diagonal.symbols()[b.split], avoid.row(k)[b.split]);
        assert_eq!(run.permutation.get(b.split), Some(b.start));
    }
    assert!(avoid.rows().all(|w| w != run.diagonal.symbols()));
}

