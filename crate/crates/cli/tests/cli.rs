use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cantoria"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn cantoria");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn check_exit_codes() {
    let yes = run(&["check"], "ab\nba\n");
    assert_eq!(yes.status.code(), Some(0));
    assert!(stdout(&yes).starts_with("cantorian"));

    let no = run(&["check"], "aba\nbab\nbbb\n");
    assert_eq!(no.status.code(), Some(1));
    assert!(stdout(&no).starts_with("not cantorian"));

    let bad = run(&["check"], "ab\nb\n");
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn check_reads_files_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, r#"{"schema":"cantoria/1","n":2,"s":2,"rows":["01","10"]}"#).unwrap();
    let o = run(&["--format", "json", "check", path.to_str().unwrap()], "");
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], "cantoria/1");
    assert_eq!(v["cantorian"], true);
    assert_eq!(v["criteria"][0], "complement_pairing");

    let o = run(&["--format", "json", "check"], "aba\nbab\nbbb\n");
    let v = json(&o);
    assert_eq!(v["cantorian"], false);
    assert_eq!(v["witness"]["row"], 2);
}

#[test]
fn explicit_alphabet_size() {
    let o = run(&["--format", "json", "check", "--s", "3"], "01\n10\n");
    assert_eq!(json(&o)["s"], 3);
    let o = run(&["check", "--s", "2"], "02\n20\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn perm_lists_the_row_in_the_permanent() {
    let o = run(&["perm"], "aba\nbab\nbbb\n");
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("|Perm(T)| = 5"));
    assert!(text.lines().any(|l| l == "111"));
    let v = json(&run(&["--format", "json", "perm"], "aba\nbab\nbbb\n"));
    assert_eq!(v["size"], 5);
    assert!(v["words"].as_array().unwrap().contains(&"111".into()));
}

#[test]
fn count_text_and_json_agree() {
    let o = run(&["count", "--n", "3", "--s", "2"], "");
    assert_eq!(stdout(&o).lines().next(), Some("24"));
    for method in ["brute", "normalized", "last-column"] {
        let v = json(&run(&["--format", "json", "count", "--n", "4", "--method", method], ""));
        assert_eq!(v["count"], "1744", "{method}");
        assert_eq!(v["schema"], "cantoria/1");
    }
    let v = json(&run(&["--format", "json", "count", "--n", "2", "--s", "3"], ""));
    assert_eq!(v["count"], "36");
}

#[test]
fn count_shards_and_occurrences() {
    let mut total = 0u64;
    for i in 0..3 {
        let shard = format!("{i}/3");
        let v = json(&run(&["--format", "json", "--jobs", "1", "count", "--n", "4", "--shard", &shard], ""));
        assert_eq!(v["shards"]["of"], 3);
        total += v["count"].as_str().unwrap().parse::<u64>().unwrap();
    }
    assert_eq!(total, 1744);

    let v = json(&run(&["--format", "json", "count", "--n", "3", "--by-p"], ""));
    assert_eq!(v["counts"], serde_json::json!([0, 0, 0, 3, 9, 9, 3, 0, 0, 0]));
    let v = json(&run(&["--format", "json", "count", "--n", "4", "--p", "6"], ""));
    assert_eq!(v["count"], "112");
    assert_eq!(v["p"], 6);

    let o = run(&["count", "--n", "3", "--s", "3", "--method", "normalized"], "");
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--budget", "10", "count", "--n", "3"], "");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_is_reproducible() {
    let a = run(&["--format", "json", "--seed", "5", "sample", "--n", "3", "--s", "2", "--trials", "2000"], "");
    let b = run(&["--format", "json", "--seed", "5", "sample", "--n", "3", "--s", "2", "--trials", "2000"], "");
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["estimate"]["trials"], 2000);
    let h = json(&run(&["--format", "json", "sample", "--n", "8", "--s", "2", "--trials", "300", "--hamilton"], ""));
    assert_eq!(h["audit"]["violations"], 0);
}

#[test]
fn sweep_csv_columns() {
    let o = run(&["--format", "csv", "sweep", "--n", "30", "--trials", "20"], "");
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,s,regime,trials,hits,fraction,ci_lo,ci_hi,seed,r_n,epsilon,log_base")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",below,") && rows[1].contains(",above,"));
}

#[test]
fn diagonalize_greedy_and_avoid() {
    let v = json(&run(
        &["--format", "json", "diagonalize", "--depth", "6", "--target", "110100"],
        "",
    ));
    assert_eq!(v["diagonal_text"], "110100");
    assert_eq!(v["run"]["completed"], true);

    let dir = tempfile::tempdir().unwrap();
    let rows = dir.path().join("rows.txt");
    let avoid = dir.path().join("avoid.txt");
    std::fs::write(&rows, "01\n10\n").unwrap();
    std::fs::write(&avoid, "00\n").unwrap();
    let v = json(&run(
        &[
            "--format",
            "json",
            "diagonalize",
            "--depth",
            "2",
            "--corpus",
            "file",
            "--file",
            rows.to_str().unwrap(),
            "--avoid-file",
            avoid.to_str().unwrap(),
        ],
        "",
    ));
    assert_eq!(v["diagonal_text"], "11");
    assert_eq!(v["run"]["permutation"]["assignments"], serde_json::json!([1, 0]));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"], "");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"], "").status.code(), Some(2));
    assert_eq!(run(&["count"], "").status.code(), Some(2));
    assert_eq!(run(&["count", "--n", "3", "--unknown"], "").status.code(), Some(2));
}
