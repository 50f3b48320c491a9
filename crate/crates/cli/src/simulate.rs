//! Seeded Monte Carlo experiments emitting one CSV row per (run, checkpoint).

use std::io::Write;

use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Algorithm, Estimator, Params, RunConfig};
use crate::CliError;

pub const CSV_HEADER: [&str; 10] = ["scenario", "algo", "n", "m", "q", "d", "seed", "run", "estimate", "ratio"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Distinct-count estimators at power-of-two checkpoints.
    AccuracyVsN,
    /// Approximate counters at power-of-two checkpoints.
    MorrisVariance,
    /// PCSA at evenly spaced checkpoints.
    Distortion,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::AccuracyVsN => "accuracy-vs-n",
            Scenario::MorrisVariance => "morris-variance",
            Scenario::Distortion => "distortion",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub scenario: Scenario,
    pub algorithm: Option<Algorithm>,
    /// Distinct elements (or increments for counters).
    pub n: u64,
    pub runs: u64,
    pub seed: u64,
    pub m: Option<usize>,
    pub k: Option<u32>,
    /// Bases for `morris-variance`; empty means the default set.
    pub q: Vec<f64>,
    /// Significand widths for `morris-variance`.
    pub d: Vec<u32>,
    /// Checkpoint spacing for `distortion`.
    pub step: u64,
    /// Occurrences of each synthetic element.
    pub dup: u64,
}

impl SimulateConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            algorithm: None,
            n: 10_000,
            runs: 100,
            seed: 0,
            m: None,
            k: None,
            q: Vec::new(),
            d: Vec::new(),
            step: 64,
            dup: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scenario: Scenario,
    pub algo: Algorithm,
    pub n: u64,
    pub params: Params,
    pub seed: u64,
    pub run: u64,
    pub estimate: f64,
}

impl Row {
    pub fn ratio(&self) -> f64 {
        self.estimate / self.n as f64
    }

    fn fields(&self) -> [String; 10] {
        let opt = |v: Option<String>| v.unwrap_or_default();
        [
            self.scenario.name().to_string(),
            self.algo.name().to_string(),
            self.n.to_string(),
            opt(self.params.m().map(|m| m.to_string())),
            opt(self.params.q().map(|q| q.to_string())),
            opt(self.params.d().map(|d| d.to_string())),
            self.seed.to_string(),
            self.run.to_string(),
            self.estimate.to_string(),
            self.ratio().to_string(),
        ]
    }
}

/// SplitMix64 finalizer over `(seed, run)`: the per-run seed.
pub fn run_seed(seed: u64, run: u64) -> u64 {
    let mut z = seed ^ run.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Elements `1..=n`, each repeated `dup` times, shuffled from `seed`.
pub fn synthetic_stream(n: u64, dup: u64, seed: u64) -> Vec<u64> {
    let mut stream: Vec<u64> = (1..=n).flat_map(|x| std::iter::repeat_n(x, dup as usize)).collect();
    stream.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    stream
}

fn powers_of_two_upto(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(1u64), |&x| x.checked_mul(2))
        .take_while(|&x| x < n)
        .collect();
    out.push(n);
    out
}

fn evenly_spaced(n: u64, step: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..).map(|i| i * step).take_while(|&x| x < n).collect();
    out.push(n);
    out
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Validated `(algorithm, params)` variants to simulate, in output order.
fn variants(cfg: &SimulateConfig) -> Result<Vec<(Algorithm, Params)>, CliError> {
    let resolve = |algorithm: Algorithm, q: Option<f64>, d: Option<u32>| {
        let rc = RunConfig {
            algorithm,
            seed: cfg.seed,
            m: cfg.m,
            k: cfg.k,
            q,
            d,
        };
        rc.params().map(|p| (algorithm, p))
    };
    match cfg.scenario {
        Scenario::AccuracyVsN => {
            let algo = cfg.algorithm.unwrap_or(Algorithm::Pcsa);
            if algo.is_counter() {
                return Err(usage("accuracy-vs-n takes fm, pcsa or adaptive; use morris-variance for counters"));
            }
            Ok(vec![resolve(algo, None, None)?])
        }
        Scenario::Distortion => match cfg.algorithm.unwrap_or(Algorithm::Pcsa) {
            Algorithm::Pcsa => Ok(vec![resolve(Algorithm::Pcsa, None, None)?]),
            other => Err(usage(format!("distortion simulates pcsa only, got {other}"))),
        },
        Scenario::MorrisVariance => {
            let qs = if cfg.q.is_empty() { vec![2.0, 1.1] } else { cfg.q.clone() };
            let ds = match (cfg.algorithm, cfg.d.is_empty()) {
                (Some(Algorithm::MorrisFp), true) => vec![crate::config::DEFAULT_D],
                _ => cfg.d.clone(),
            };
            let mut out = Vec::new();
            let want = |a: Algorithm| cfg.algorithm.is_none() || cfg.algorithm == Some(a);
            if let Some(a) = cfg.algorithm.filter(|a| !a.is_counter()) {
                return Err(usage(format!("morris-variance simulates counters only, got {a}")));
            }
            for &q in &qs {
                let a = if q == 2.0 { Algorithm::Morris } else { Algorithm::MorrisQ };
                if want(a) {
                    out.push(resolve(a, Some(q), None)?);
                }
            }
            if want(Algorithm::MorrisFp) {
                for &d in &ds {
                    out.push(resolve(Algorithm::MorrisFp, None, Some(d))?);
                }
            }
            if out.is_empty() {
                return Err(usage("no counter variants selected"));
            }
            Ok(out)
        }
    }
}

fn simulate_run(cfg: &SimulateConfig, algo: Algorithm, params: Params, run: u64) -> Result<Vec<Row>, CliError> {
    let seed = run_seed(cfg.seed, run);
    let mut est = Estimator::new(params, seed)?;
    let row = |n: u64, estimate: f64| Row {
        scenario: cfg.scenario,
        algo,
        n,
        params,
        seed: cfg.seed,
        run,
        estimate,
    };
    let mut rows = Vec::new();
    if algo.is_counter() {
        let checkpoints = powers_of_two_upto(cfg.n);
        let mut next = checkpoints.iter().peekable();
        for i in 1..=cfg.n {
            est.add(&[]);
            if next.peek() == Some(&&i) {
                next.next();
                rows.push(row(i, est.estimate()));
            }
        }
        return Ok(rows);
    }

    let checkpoints = match cfg.scenario {
        Scenario::Distortion => evenly_spaced(cfg.n, cfg.step),
        _ => powers_of_two_upto(cfg.n),
    };
    let mut next = checkpoints.iter().peekable();
    let mut seen = vec![false; cfg.n as usize + 1];
    let mut distinct = 0u64;
    let mut buf = itoa_buf();
    for x in synthetic_stream(cfg.n, cfg.dup, seed) {
        est.add(render(&mut buf, x));
        if !std::mem::replace(&mut seen[x as usize], true) {
            distinct += 1;
            if next.peek() == Some(&&distinct) {
                next.next();
                rows.push(row(distinct, est.estimate()));
            }
        }
    }
    Ok(rows)
}

fn itoa_buf() -> Vec<u8> {
    Vec::with_capacity(20)
}

fn render(buf: &mut Vec<u8>, x: u64) -> &[u8] {
    buf.clear();
    write!(buf, "{x}").expect("write to Vec");
    buf
}

/// Runs every variant and run, in parallel, returning rows ordered by
/// (variant, run, n).
pub fn simulate(cfg: &SimulateConfig) -> Result<Vec<Row>, CliError> {
    if cfg.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    if cfg.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if cfg.step == 0 {
        return Err(usage("--step must be at least 1"));
    }
    if cfg.dup == 0 {
        return Err(usage("--dup must be at least 1"));
    }
    let mut rows = Vec::new();
    for (algo, params) in variants(cfg)? {
        let per_run: Vec<Vec<Row>> = (0..cfg.runs)
            .into_par_iter()
            .map(|run| simulate_run(cfg, algo, params, run))
            .collect::<Result<_, _>>()?;
        rows.extend(per_run.into_iter().flatten());
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}
