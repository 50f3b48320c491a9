//! Hashing and bit-level primitives shared by every sketch.
//!
//! A [`HashedWord`] stands in for the infinite uniform binary word
//! `y0 y1 y2 ...` attached to an element: bit 0 is the most significant bit
//! of the underlying `u64`, and the word may be narrower than 64 bits after
//! [`HashedWord::split`] has consumed a prefix.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result};

/// Width in bits of a freshly hashed word.
pub const WORD_BITS: u32 = 64;

/// Seeded 64-bit uniformizing hash (XXH3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashFunction {
    seed: u64,
}

impl HashFunction {
    pub const fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub const fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn hash(&self, element: &[u8]) -> HashedWord {
        HashedWord::new(xxhash_rust::xxh3::xxh3_64_with_seed(element, self.seed))
    }
}

/// A left-aligned word of `width` bits.
///
/// Bits beyond `width` are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashedWord {
    bits: u64,
    width: u32,
}

impl HashedWord {
    /// Full-width word; bit 0 is the MSB of `bits`.
    pub const fn new(bits: u64) -> Self {
        Self { bits, width: WORD_BITS }
    }

    /// Builds a full-width word whose first `len` bits are the low `len`
    /// bits of `prefix` (read MSB first), followed by zeros.
    ///
    /// `from_prefix(0b00111, 5)` is the word `00111000...`.
    pub fn from_prefix(prefix: u64, len: u32) -> Result<Self> {
        if len == 0 {
            return Ok(Self::new(0));
        }
        if len > WORD_BITS {
            return Err(Error::InvalidArgument("prefix longer than the word"));
        }
        if len < WORD_BITS && prefix >> len != 0 {
            return Err(Error::InvalidArgument("prefix has bits above its length"));
        }
        Ok(Self::new(prefix << (WORD_BITS - len)))
    }

    /// Left-aligned bit pattern.
    pub const fn bits(&self) -> u64 {
        self.bits
    }

    pub const fn width(&self) -> u32 {
        self.width
    }

    /// Bit at position `i` (0 = leftmost).
    pub fn bit(&self, i: u32) -> bool {
        i < self.width && (self.bits >> (WORD_BITS - 1 - i)) & 1 == 1
    }

    /// Rank of the leftmost 1-bit, 0-based; `width()` for the all-zero word.
    #[inline]
    pub fn rho(&self) -> u32 {
        self.bits.leading_zeros().min(self.width)
    }

    /// Splits off the first `k` bits as a substream index and returns the
    /// remaining `width - k` bits.
    pub fn split(&self, k: u32) -> Result<(u64, HashedWord)> {
        if k >= self.width {
            return Err(Error::InvalidArgument("split width must be below the word width"));
        }
        if k == 0 {
            return Ok((0, *self));
        }
        let index = self.bits >> (WORD_BITS - k);
        let rest = HashedWord {
            bits: self.bits << k,
            width: self.width - k,
        };
        Ok((index, rest))
    }
}

/// Rank of the leftmost one; see [`HashedWord::rho`].
#[inline]
pub fn rho(w: HashedWord) -> u32 {
    w.rho()
}

/// Seedable source of uniform random bits (ChaCha8).
///
/// Independent sources for parallel workers are obtained with
/// [`RandomSource::with_stream`]: the same seed with distinct stream ids gives
/// non-overlapping keystreams.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
    seed: u64,
    buf: u64,
    buf_bits: u32,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            rng,
            seed,
            buf: 0,
            buf_bits: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform real in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Returns `n <= 64` fresh bits in the low positions.
    fn take_bits(&mut self, n: u32) -> u64 {
        debug_assert!(n <= 64);
        if n == 0 {
            return 0;
        }
        if self.buf_bits >= n {
            let out = if n == 64 { self.buf } else { self.buf & ((1u64 << n) - 1) };
            self.buf = if n == 64 { 0 } else { self.buf >> n };
            self.buf_bits -= n;
            return out;
        }
        // Use what is buffered, then top up from a fresh word.
        let have = self.buf_bits;
        let low = self.buf;
        let fresh = self.rng.next_u64();
        let need = n - have;
        let high = if need == 64 { fresh } else { fresh & ((1u64 << need) - 1) };
        self.buf = if need == 64 { 0 } else { fresh >> need };
        self.buf_bits = 64 - need;
        if have == 0 {
            high
        } else {
            low | (high << have)
        }
    }

    /// Bernoulli trial with success probability `2^-c`, consuming exactly
    /// `c` fresh bits: success iff all of them are zero.
    pub fn bernoulli_pow2(&mut self, c: u32) -> bool {
        let mut remaining = c;
        let mut all_zero = true;
        while remaining > 0 {
            let n = remaining.min(64);
            if self.take_bits(n) != 0 {
                all_zero = false;
            }
            remaining -= n;
        }
        all_zero
    }

    /// Bernoulli trial with success probability `p`.
    pub fn bernoulli_real(&mut self, p: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument("probability must lie in [0, 1]"));
        }
        Ok(self.next_f64() < p)
    }
}
