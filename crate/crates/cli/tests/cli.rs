use std::io::Write;
use std::process::{Command, Output, Stdio};

use proptest::prelude::*;
use streamcount::adaptive::AdaptiveSample;
use streamcount::fm::PcsaSketch;
use streamcount::hashcore::HashFunction;
use streamcount_cli::format;

fn run(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_streamcount"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(args: &[&str], stdin: &[u8]) -> String {
    let out = run(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn first_f64(text: &str) -> f64 {
    text.lines().next().unwrap().trim().parse().unwrap()
}

fn distinct(n: usize) -> String {
    (0..n).map(|i| format!("item-{i}\n")).collect()
}

fn summary(text: &str) -> std::collections::HashMap<String, String> {
    let line = text.lines().last().unwrap();
    line.trim_start_matches("# ")
        .split(' ')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn pcsa_count_is_close() {
    let est = first_f64(&stdout(&["count", "--algo", "pcsa", "--k", "9", "--seed", "1"], distinct(10_000).as_bytes()));
    assert!((est / 10_000.0 - 1.0).abs() < 0.1, "{est}");
}

#[test]
fn adaptive_is_exact_below_capacity() {
    let est = first_f64(&stdout(&["count", "--algo", "adaptive", "--m", "64"], distinct(50).as_bytes()));
    assert_eq!(est, 50.0);
}

#[test]
fn verbose_prints_state() {
    let text = stdout(&["count", "--algo", "fm", "-v"], distinct(100).as_bytes());
    assert!(text.contains("algo=fm\n"));
    assert!(text.contains("tokens=100\n"));
    assert!(text.contains("\nr="));
}

#[test]
fn counters_count_every_token() {
    let text = stdout(&["count", "--algo", "morris-fp", "--d", "8", "-v"], "x\n".repeat(200).as_bytes());
    assert_eq!(first_f64(&text), 200.0);
}

#[test]
fn sample_of_distinct_stream_has_unit_frequencies() {
    let text = stdout(&["sample", "--m", "32", "--seed", "5"], distinct(1000).as_bytes());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("element,frequency"));
    let rows: Vec<&str> = lines.take_while(|l| !l.starts_with('#')).collect();
    assert!(!rows.is_empty() && rows.len() <= 32);
    assert!(rows.iter().all(|r| r.ends_with(",1")));
    let s = summary(&text);
    assert_eq!(s["mice"], "1");
    assert_eq!(s["size"], rows.len().to_string());
}

#[test]
fn repeated_token_keeps_full_frequency() {
    let text = stdout(&["sample"], "only\n".repeat(1_000_000).as_bytes());
    assert!(text.contains("\nonly,1000000\n"));
    assert_eq!(summary(&text)["estimate"], "1");
}

#[test]
fn half_mice_stream() {
    // 500 singletons and 500 elements seen twice.
    let mut input = String::new();
    for i in 0..1000 {
        let reps = if i % 2 == 0 { 1 } else { 2 };
        for _ in 0..reps {
            input.push_str(&format!("e{i}\n"));
        }
    }
    let text = stdout(&["sample", "--m", "256", "--seed", "3"], input.as_bytes());
    let mice: f64 = summary(&text)["mice"].parse().unwrap();
    assert!((mice - 0.5).abs() < 0.1, "{mice}");
}

#[test]
fn empty_sample_has_undefined_fractions() {
    let text = stdout(&["sample"], b"");
    assert_eq!(summary(&text)["mice"], "undefined");
}

#[test]
fn smaller_base_has_smaller_spread() {
    let text = stdout(
        &["simulate", "morris-variance", "--n", "1000", "--runs", "400", "--q", "1.1", "--q", "2"],
        b"",
    );
    let mut by_q: std::collections::HashMap<String, Vec<f64>> = Default::default();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for rec in rows.records() {
        let rec = rec.unwrap();
        if rec[2] == *"1000" && !rec[4].is_empty() {
            by_q.entry(rec[4].to_string()).or_default().push(rec[9].parse().unwrap());
        }
    }
    let sd = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    };
    assert_eq!(by_q["1.1"].len(), 400);
    assert!(sd(&by_q["1.1"]) < sd(&by_q["2"]));
}

#[test]
fn simulate_csv_header() {
    let text = stdout(&["simulate", "accuracy-vs-n", "--n", "100", "--runs", "2"], b"");
    assert_eq!(text.lines().next(), Some("scenario,algo,n,m,q,d,seed,run,estimate,ratio"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["count", "--algo", "pcsa", "--m", "100"], b"").status.code(), Some(1));
    assert_eq!(run(&["bogus"], b"").status.code(), Some(1));
    assert_eq!(run(&["count", "/nonexistent/tokens"], b"").status.code(), Some(2));
    assert_eq!(run(&["count", "--algo", "morris", "--save", "x.bin"], b"").status.code(), Some(1));
    assert_eq!(run(&["--help"], b"").status.code(), Some(0));
}

#[test]
fn save_and_merge_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let all = distinct(6000);
    let (left, right) = all.split_at(all.find("item-3000\n").unwrap());
    for algo in ["pcsa", "adaptive"] {
        let (a, b, m) = (path(&format!("{algo}-a")), path(&format!("{algo}-b")), path(&format!("{algo}-m")));
        stdout(&["count", "--algo", algo, "--seed", "9", "--save", &a], left.as_bytes());
        stdout(&["count", "--algo", algo, "--seed", "9", "--save", &b], right.as_bytes());
        let merged = stdout(&["merge", &a, &b, "--save", &m], b"");
        let whole = stdout(&["count", "--algo", algo, "--seed", "9"], all.as_bytes());
        assert_eq!(merged, whole, "{algo}");
        assert_eq!(stdout(&["merge", &m], b""), whole);
    }
}

#[test]
fn incompatible_merge_fails() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a").to_str().unwrap().to_string();
    let b = dir.path().join("b").to_str().unwrap().to_string();
    stdout(&["count", "--seed", "1", "--save", &a], b"x\n");
    stdout(&["count", "--seed", "2", "--save", &b], b"x\n");
    assert_eq!(run(&["merge", &a, &b], b"").status.code(), Some(1));
    std::fs::write(&b, b"garbage").unwrap();
    assert_eq!(run(&["merge", &a, &b], b"").status.code(), Some(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formats_round_trip(seed in any::<u64>(), k in 0u32..6, m in 1usize..40, items in prop::collection::vec(any::<u16>(), 0..300)) {
        let mut p = PcsaSketch::new(k, HashFunction::new(seed)).unwrap();
        let mut s = AdaptiveSample::new(m, HashFunction::new(seed)).unwrap();
        for x in &items {
            p.add(&x.to_le_bytes());
            s.add(&x.to_le_bytes());
        }
        prop_assert_eq!(format::decode_pcsa(&format::encode_pcsa(&p)).unwrap(), p);
        prop_assert_eq!(format::decode_sample(&format::encode_sample(&s)).unwrap(), s);
    }
}
