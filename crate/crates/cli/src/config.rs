//! Algorithm selection and per-algorithm parameter validation.

use std::fmt;

use clap::ValueEnum;
use streamcount::adaptive::AdaptiveSample;
use streamcount::fm::{FmSketch, PcsaSketch, MAX_SPLIT_BITS};
use streamcount::hashcore::{HashFunction, RandomSource};
use streamcount::morris::{FloatingPointCounter, MorrisCounter, MAX_SIGNIFICAND_BITS};

use crate::CliError;

pub const DEFAULT_PCSA_K: u32 = 9;
pub const DEFAULT_CAPACITY: usize = 64;
pub const DEFAULT_Q: f64 = 1.1;
pub const DEFAULT_D: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Morris,
    MorrisQ,
    MorrisFp,
    Fm,
    Pcsa,
    Adaptive,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Morris => "morris",
            Algorithm::MorrisQ => "morris-q",
            Algorithm::MorrisFp => "morris-fp",
            Algorithm::Fm => "fm",
            Algorithm::Pcsa => "pcsa",
            Algorithm::Adaptive => "adaptive",
        }
    }

    /// Counts events rather than distinct elements.
    pub fn is_counter(&self) -> bool {
        matches!(self, Algorithm::Morris | Algorithm::MorrisQ | Algorithm::MorrisFp)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw command-line parameters, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub m: Option<usize>,
    pub k: Option<u32>,
    pub q: Option<f64>,
    pub d: Option<u32>,
}

/// Validated parameters for one estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    Morris,
    MorrisQ { q: f64 },
    MorrisFp { d: u32 },
    Fm,
    Pcsa { k: u32 },
    Adaptive { m: usize },
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        Self {
            algorithm,
            seed,
            m: None,
            k: None,
            q: None,
            d: None,
        }
    }

    pub fn params(&self) -> Result<Params, CliError> {
        Ok(match self.algorithm {
            Algorithm::Morris => {
                if self.q.is_some_and(|q| q != 2.0) {
                    return Err(usage("morris uses q = 2; use --algo morris-q for other bases"));
                }
                Params::Morris
            }
            Algorithm::MorrisQ => {
                let q = self.q.unwrap_or(DEFAULT_Q);
                if !(q > 1.0 && q.is_finite()) {
                    return Err(usage(format!("--q must be a finite number > 1, got {q}")));
                }
                Params::MorrisQ { q }
            }
            Algorithm::MorrisFp => {
                let d = self.d.unwrap_or(DEFAULT_D);
                if d == 0 || d > MAX_SIGNIFICAND_BITS {
                    return Err(usage(format!("--d must be in 1..={MAX_SIGNIFICAND_BITS}, got {d}")));
                }
                Params::MorrisFp { d }
            }
            Algorithm::Fm => Params::Fm,
            Algorithm::Pcsa => Params::Pcsa { k: self.pcsa_k()? },
            Algorithm::Adaptive => {
                if self.k.is_some() {
                    return Err(usage("adaptive takes --m, not --k"));
                }
                let m = self.m.unwrap_or(DEFAULT_CAPACITY);
                if m == 0 {
                    return Err(usage("--m must be at least 1"));
                }
                Params::Adaptive { m }
            }
        })
    }

    fn pcsa_k(&self) -> Result<u32, CliError> {
        let from_m = match self.m {
            Some(m) if m.is_power_of_two() => Some(m.trailing_zeros()),
            Some(m) => return Err(usage(format!("--m must be a power of two for pcsa, got {m}"))),
            None => None,
        };
        let k = match (self.k, from_m) {
            (Some(k), Some(km)) if k != km => {
                return Err(usage(format!("--k {k} and --m {} disagree", 1usize << km)))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => DEFAULT_PCSA_K,
        };
        if k > MAX_SPLIT_BITS {
            return Err(usage(format!("--k must be at most {MAX_SPLIT_BITS}, got {k}")));
        }
        Ok(k)
    }
}

impl Params {
    pub fn m(&self) -> Option<usize> {
        match *self {
            Params::Pcsa { k } => Some(1 << k),
            Params::Fm => Some(1),
            Params::Adaptive { m } => Some(m),
            _ => None,
        }
    }

    pub fn q(&self) -> Option<f64> {
        match *self {
            Params::Morris => Some(2.0),
            Params::MorrisQ { q } => Some(q),
            _ => None,
        }
    }

    pub fn d(&self) -> Option<u32> {
        match *self {
            Params::MorrisFp { d } => Some(d),
            _ => None,
        }
    }
}

/// Any of the streaming estimators behind one interface.
#[derive(Debug, Clone)]
pub enum Estimator {
    Morris(MorrisCounter, RandomSource),
    MorrisFp(FloatingPointCounter, RandomSource),
    Fm(FmSketch),
    Pcsa(PcsaSketch),
    Adaptive(AdaptiveSample),
}

impl Estimator {
    /// Counters draw their trials from stream 1 of `seed`; sketches hash
    /// with `seed` itself.
    pub fn new(params: Params, seed: u64) -> Result<Self, CliError> {
        let hash = HashFunction::new(seed);
        let rng = || RandomSource::with_stream(seed, 1);
        Ok(match params {
            Params::Morris => Estimator::Morris(MorrisCounter::binary(), rng()),
            Params::MorrisQ { q } => Estimator::Morris(MorrisCounter::with_base(q)?, rng()),
            Params::MorrisFp { d } => Estimator::MorrisFp(FloatingPointCounter::new(d)?, rng()),
            Params::Fm => Estimator::Fm(FmSketch::new(hash)),
            Params::Pcsa { k } => Estimator::Pcsa(PcsaSketch::new(k, hash)?),
            Params::Adaptive { m } => Estimator::Adaptive(AdaptiveSample::new(m, hash)?),
        })
    }

    pub fn add(&mut self, token: &[u8]) {
        match self {
            Estimator::Morris(c, rng) => {
                c.add_one(rng);
            }
            Estimator::MorrisFp(c, rng) => {
                c.add_one(rng);
            }
            Estimator::Fm(s) => s.add(token),
            Estimator::Pcsa(s) => s.add(token),
            Estimator::Adaptive(s) => s.add(token),
        }
    }

    pub fn estimate(&self) -> f64 {
        match self {
            Estimator::Morris(c, _) => c.estimate(),
            Estimator::MorrisFp(c, _) => c.estimate(),
            Estimator::Fm(s) => s.estimate(),
            Estimator::Pcsa(s) => s.estimate(),
            Estimator::Adaptive(s) => s.estimate(),
        }
    }

    /// `key=value` pairs describing internal state.
    pub fn state(&self) -> Vec<(&'static str, String)> {
        fn join(it: impl Iterator<Item = u32>) -> String {
            it.map(|r| r.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            Estimator::Morris(c, _) => vec![("c", c.value().to_string()), ("q", c.base().q().to_string())],
            Estimator::MorrisFp(c, _) => vec![
                ("state", c.state().to_string()),
                ("exponent", c.exponent().to_string()),
                ("significand", c.significand().to_string()),
                ("d", c.significand_bits().to_string()),
            ],
            Estimator::Fm(s) => vec![("bitmap", format!("{:#018x}", s.bitmap())), ("r", s.rank().to_string())],
            Estimator::Pcsa(s) => vec![
                ("k", s.k().to_string()),
                ("m", s.substreams().to_string()),
                ("r", join(s.ranks())),
            ],
            Estimator::Adaptive(s) => vec![
                ("m", s.capacity().to_string()),
                ("depth", s.depth().to_string()),
                ("cache", s.len().to_string()),
            ],
        }
    }
}
