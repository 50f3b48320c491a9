//! Subcommand bodies, independent of argument parsing.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use streamcount::adaptive::AdaptiveSample;
use streamcount::analysis::{phi_product, phi_slow_product, xi_integral, ConstantResult, XiQuadrature};
use streamcount::hashcore::HashFunction;

use crate::config::{Estimator, Params, RunConfig};
use crate::format::{self, Kind};
use crate::CliError;

/// Calls `f` with every newline-delimited token, without the delimiter.
/// A trailing newline does not produce an empty token.
pub fn for_each_token<R: BufRead>(mut input: R, mut f: impl FnMut(&[u8])) -> Result<(), CliError> {
    let mut line = Vec::new();
    loop {
        line.clear();
        if input.read_until(b'\n', &mut line)? == 0 {
            return Ok(());
        }
        if line.last() == Some(&b'\n') {
            line.pop();
        }
        f(&line);
    }
}

pub struct CountOptions {
    pub verbose: bool,
    pub save: Option<std::path::PathBuf>,
}

pub fn count<R: BufRead, W: Write>(cfg: &RunConfig, opts: &CountOptions, input: R, mut out: W) -> Result<(), CliError> {
    let params = cfg.params()?;
    if opts.save.is_some() && cfg.algorithm.is_counter() {
        return Err(CliError::Usage("--save applies to fm, pcsa and adaptive only".into()));
    }
    let mut est = Estimator::new(params, cfg.seed)?;
    let mut tokens = 0u64;
    for_each_token(input, |t| {
        est.add(t);
        tokens += 1;
    })?;
    writeln!(out, "{}", est.estimate())?;
    if opts.verbose {
        writeln!(out, "algo={}", cfg.algorithm)?;
        writeln!(out, "seed={}", cfg.seed)?;
        writeln!(out, "tokens={tokens}")?;
        for (k, v) in est.state() {
            writeln!(out, "{k}={v}")?;
        }
    }
    if let Some(path) = &opts.save {
        let bytes = match &est {
            Estimator::Fm(s) => format::encode_fm(s),
            Estimator::Pcsa(s) => format::encode_pcsa(s),
            Estimator::Adaptive(s) => format::encode_sample(s),
            Estimator::Morris(..) | Estimator::MorrisFp(..) => unreachable!("rejected above"),
        };
        fs::write(path, bytes)?;
    }
    out.flush()?;
    Ok(())
}

pub struct SampleOptions {
    /// Mice: frequency at most this.
    pub mice_max: u64,
    /// Elephants: frequency above this.
    pub elephant_min: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            mice_max: 1,
            elephant_min: 10,
        }
    }
}

fn fraction_text(r: Result<f64, streamcount::Error>) -> String {
    r.map(|f| f.to_string()).unwrap_or_else(|_| "undefined".into())
}

pub fn write_sample<W: Write>(s: &AdaptiveSample, opts: &SampleOptions, mut out: W) -> Result<(), CliError> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["element", "frequency"])?;
        for (x, f) in s.sample() {
            w.write_record([x, f.to_string().as_bytes()])?;
        }
        w.flush()?;
    }
    let mice = fraction_text(s.class_fraction(|f| f <= opts.mice_max));
    let elephants = fraction_text(s.class_fraction(|f| f > opts.elephant_min));
    writeln!(
        out,
        "# estimate={} depth={} size={} mice={mice} elephants={elephants}",
        s.estimate(),
        s.depth(),
        s.len()
    )?;
    out.flush()?;
    Ok(())
}

pub fn sample<R: BufRead, W: Write>(cfg: &RunConfig, opts: &SampleOptions, input: R, out: W) -> Result<(), CliError> {
    let m = match cfg.params()? {
        Params::Adaptive { m } => m,
        _ => return Err(CliError::Usage("sample requires --algo adaptive".into())),
    };
    let mut s = AdaptiveSample::new(m, HashFunction::new(cfg.seed))?;
    for_each_token(input, |t| s.add(t))?;
    write_sample(&s, opts, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ConstantTarget {
    Phi,
    PhiSlow,
    Xi,
    All,
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantOptions {
    pub terms: u64,
    pub slow_terms: u64,
    pub quadrature: XiQuadrature,
}

impl Default for ConstantOptions {
    fn default() -> Self {
        Self {
            terms: 1 << 16,
            slow_terms: 1 << 24,
            quadrature: XiQuadrature::default(),
        }
    }
}

pub fn compute_constants(target: ConstantTarget, opts: &ConstantOptions) -> Result<Vec<(&'static str, ConstantResult)>, CliError> {
    let mut out = Vec::new();
    if matches!(target, ConstantTarget::Phi | ConstantTarget::All) {
        out.push(("phi", phi_product(opts.terms)?));
    }
    if matches!(target, ConstantTarget::PhiSlow | ConstantTarget::All) {
        out.push(("phi-slow", phi_slow_product(opts.slow_terms)?));
    }
    if matches!(target, ConstantTarget::Xi | ConstantTarget::All) {
        out.push(("xi", xi_integral(&opts.quadrature)?));
    }
    Ok(out)
}

pub fn constants<W: Write>(target: ConstantTarget, opts: &ConstantOptions, mut out: W) -> Result<(), CliError> {
    let results = compute_constants(target, opts)?;
    writeln!(out, "{:<10} {:<20} {:>10} {:>12}", "constant", "value", "terms", "error_bound")?;
    for (name, r) in &results {
        writeln!(out, "{name:<10} {:<20.17} {:>10} {:>12.3e}", r.value, r.terms_used, r.error_bound)?;
    }
    if results.len() > 1 {
        let mut spread = 0f64;
        for (i, (_, a)) in results.iter().enumerate() {
            for (_, b) in &results[i + 1..] {
                spread = spread.max((a.value - b.value).abs());
            }
        }
        writeln!(out, "max pairwise difference: {spread:.3e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Merges serialized sketches or samples of one kind, prints the merged
/// estimate and optionally writes the merged file.
pub fn merge<W: Write>(inputs: &[impl AsRef<Path>], save: Option<&Path>, mut out: W) -> Result<(), CliError> {
    let Some((first, rest)) = inputs.split_first() else {
        return Err(CliError::Usage("merge needs at least one input".into()));
    };
    let first_bytes = fs::read(first)?;
    let (estimate, bytes) = match format::detect(&first_bytes)? {
        Kind::Bitmaps => {
            let mut acc = format::decode_pcsa(&first_bytes)?;
            for p in rest {
                acc.merge(&format::decode_pcsa(&fs::read(p)?)?)?;
            }
            (acc.estimate(), format::encode_pcsa(&acc))
        }
        Kind::Sample => {
            let mut acc = format::decode_sample(&first_bytes)?;
            for p in rest {
                acc.merge(&format::decode_sample(&fs::read(p)?)?)?;
            }
            (acc.estimate(), format::encode_sample(&acc))
        }
    };
    writeln!(out, "{estimate}")?;
    if let Some(path) = save {
        fs::write(path, bytes)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Algorithm;

    #[test]
    fn tokens_are_raw_lines() {
        let mut seen = Vec::new();
        for_each_token(&b"a\n\nb\r\nc"[..], |t| seen.push(t.to_vec())).unwrap();
        assert_eq!(seen, vec![b"a".to_vec(), vec![], b"b\r".to_vec(), b"c".to_vec()]);
        let mut n = 0;
        for_each_token(&b"x\n"[..], |_| n += 1).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn sample_output_for_repeated_token() {
        let input = "tok\n".repeat(1000);
        let mut out = Vec::new();
        let cfg = RunConfig::new(Algorithm::Adaptive, 0);
        sample(&cfg, &SampleOptions::default(), input.as_bytes(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "element,frequency\ntok,1000\n# estimate=1 depth=0 size=1 mice=0 elephants=1\n");
    }

    #[test]
    fn sample_quotes_awkward_elements() {
        let mut out = Vec::new();
        let cfg = RunConfig::new(Algorithm::Adaptive, 0);
        sample(&cfg, &SampleOptions::default(), &b"a,b\n"[..], &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().contains("\"a,b\",1\n"));
    }

    #[test]
    fn empty_sample_reports_undefined_fractions() {
        let mut out = Vec::new();
        let cfg = RunConfig::new(Algorithm::Adaptive, 0);
        sample(&cfg, &SampleOptions::default(), &b""[..], &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().ends_with("mice=undefined elephants=undefined\n"));
    }

    #[test]
    fn sample_requires_adaptive() {
        let cfg = RunConfig::new(Algorithm::Pcsa, 0);
        let err = sample(&cfg, &SampleOptions::default(), &b""[..], Vec::new()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
