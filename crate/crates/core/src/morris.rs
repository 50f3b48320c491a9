//! Approximate counting.
//!
//! [`MorrisCounter`] keeps `C` (starting at 1) and increments it with
//! probability `q^-C`; `f(C) = (q^C - q)/(q - 1)` is an unbiased estimate of
//! the number of increments. [`FloatingPointCounter`] splits its state into a
//! `d`-bit significand and a binary exponent, so counts below `2^d` are exact.

use crate::hashcore::RandomSource;
use crate::{Error, Result};

/// Logarithm base of a [`MorrisCounter`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Base {
    /// `q = 2`, driven by integer-only bit trials.
    Binary,
    /// Any real `q > 1`, driven by a uniform real comparison.
    Real(f64),
}

impl Base {
    pub fn new(q: f64) -> Result<Self> {
        if q <= 1.0 || !q.is_finite() {
            return Err(Error::InvalidArgument("counter base must be a finite q > 1"));
        }
        Ok(if q == 2.0 { Base::Binary } else { Base::Real(q) })
    }

    pub fn q(&self) -> f64 {
        match *self {
            Base::Binary => 2.0,
            Base::Real(q) => q,
        }
    }
}

/// `f(c) = (q^c - q)/(q - 1)`, exactly `2^c - 2` for `q = 2`.
pub fn morris_value(c: u32, q: f64) -> f64 {
    if q == 2.0 {
        libm::exp2(c as f64) - 2.0
    } else {
        (libm::pow(q, c as f64) - q) / (q - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorrisCounter {
    c: u32,
    base: Base,
}

impl MorrisCounter {
    pub fn new(base: Base) -> Self {
        Self { c: 1, base }
    }

    pub fn binary() -> Self {
        Self::new(Base::Binary)
    }

    pub fn with_base(q: f64) -> Result<Self> {
        Base::new(q).map(Self::new)
    }

    pub fn value(&self) -> u32 {
        self.c
    }

    pub fn base(&self) -> Base {
        self.base
    }

    /// One increment attempt. Returns whether `C` was incremented.
    pub fn add_one(&mut self, rng: &mut RandomSource) -> bool {
        let hit = match self.base {
            Base::Binary => rng.bernoulli_pow2(self.c),
            // q^-C is always in (0, 1), so the comparison cannot fail.
            Base::Real(q) => rng.next_f64() < libm::pow(q, -(self.c as f64)),
        };
        if hit {
            self.c += 1;
        }
        hit
    }

    pub fn estimate(&self) -> f64 {
        morris_value(self.c, self.base.q())
    }
}

/// Largest supported significand width.
pub const MAX_SIGNIFICAND_BITS: u32 = 32;

/// Counter state `M = t * 2^d + u` with exponent `t` and `d`-bit significand `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloatingPointCounter {
    m: u64,
    d: u32,
}

impl FloatingPointCounter {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 || d > MAX_SIGNIFICAND_BITS {
            return Err(Error::InvalidArgument("significand width must be in 1..=32"));
        }
        Ok(Self { m: 0, d })
    }

    pub fn state(&self) -> u64 {
        self.m
    }

    pub fn significand_bits(&self) -> u32 {
        self.d
    }

    pub fn exponent(&self) -> u32 {
        (self.m >> self.d) as u32
    }

    pub fn significand(&self) -> u64 {
        self.m & ((1u64 << self.d) - 1)
    }

    /// Increments `M` with probability `2^-t`. Returns whether it moved.
    pub fn add_one(&mut self, rng: &mut RandomSource) -> bool {
        let hit = rng.bernoulli_pow2(self.exponent());
        if hit {
            self.m += 1;
        }
        hit
    }

    /// `2^t (u + 2^d) - 2^d`.
    pub fn estimate(&self) -> f64 {
        fp_value(self.m, self.d)
    }
}

/// Estimate attached to floating-point counter state `m` with width `d`.
pub fn fp_value(m: u64, d: u32) -> f64 {
    let t = (m >> d) as f64;
    let u = (m & ((1u64 << d) - 1)) as f64;
    let scale = libm::exp2(d as f64);
    libm::exp2(t) * (u + scale) - scale
}
