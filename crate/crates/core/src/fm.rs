//! Probabilistic counting with bitmaps.
//!
//! Bit `i` of a bitmap is set once some element hashed to a word with
//! leftmost-one rank `i`. The statistic `R` is the position of the leftmost
//! zero of the bitmap, and `2^R / φ` estimates the number of distinct
//! elements. [`PcsaSketch`] routes every element through its first `k` hash
//! bits to one of `m = 2^k` bitmaps and averages their `R` values.
//!
//! Bitmaps are stored in a `u64` with bit `i` at `1 << i`.

use alloc::vec;
use alloc::vec::Vec;

use crate::analysis::PHI;
use crate::hashcore::{HashFunction, HashedWord, WORD_BITS};
use crate::{Error, Result};

/// Largest supported `k` for [`PcsaSketch`] (`m = 2^24` bitmaps).
pub const MAX_SPLIT_BITS: u32 = 24;

/// Position of the leftmost zero of a `width`-bit bitmap; `width` if full.
#[inline]
pub fn leftmost_zero(bitmap: u64, width: u32) -> u32 {
    bitmap.trailing_ones().min(width)
}

#[inline]
fn mark(bitmap: &mut u64, w: HashedWord) {
    let r = w.rho();
    // r == width is the all-zero sentinel: dropped.
    if r < w.width() {
        *bitmap |= 1u64 << r;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmSketch {
    bitmap: u64,
    hash: HashFunction,
}

impl FmSketch {
    pub fn new(hash: HashFunction) -> Self {
        Self { bitmap: 0, hash }
    }

    /// Rebuilds a sketch from a stored bitmap.
    pub fn from_parts(hash: HashFunction, bitmap: u64) -> Self {
        Self { bitmap, hash }
    }

    pub fn hash_function(&self) -> HashFunction {
        self.hash
    }

    pub fn bitmap(&self) -> u64 {
        self.bitmap
    }

    pub fn add(&mut self, element: &[u8]) {
        let w = self.hash.hash(element);
        mark(&mut self.bitmap, w);
    }

    /// Feeds an already hashed word, bypassing the hash function.
    pub fn add_word(&mut self, w: HashedWord) {
        mark(&mut self.bitmap, w);
    }

    pub fn rank(&self) -> u32 {
        leftmost_zero(self.bitmap, WORD_BITS)
    }

    pub fn is_empty(&self) -> bool {
        self.bitmap == 0
    }

    /// `2^R / φ`, or 0 for an empty sketch.
    pub fn estimate(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        libm::exp2(self.rank() as f64) / PHI
    }

    pub fn merge(&mut self, other: &FmSketch) -> Result<()> {
        if self.hash != other.hash {
            return Err(Error::Incompatible("hash seeds differ"));
        }
        self.bitmap |= other.bitmap;
        Ok(())
    }
}

/// Stochastic averaging over `m = 2^k` substream bitmaps of width `64 - k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcsaSketch {
    k: u32,
    bitmaps: Vec<u64>,
    hash: HashFunction,
}

impl PcsaSketch {
    pub fn new(k: u32, hash: HashFunction) -> Result<Self> {
        if k > MAX_SPLIT_BITS {
            return Err(Error::InvalidArgument("k exceeds MAX_SPLIT_BITS"));
        }
        Ok(Self {
            k,
            bitmaps: vec![0; 1usize << k],
            hash,
        })
    }

    /// Rebuilds a sketch from stored bitmaps; rejects bits above the
    /// substream word width.
    pub fn from_parts(k: u32, hash: HashFunction, bitmaps: Vec<u64>) -> Result<Self> {
        if k > MAX_SPLIT_BITS {
            return Err(Error::InvalidArgument("k exceeds MAX_SPLIT_BITS"));
        }
        if bitmaps.len() != 1usize << k {
            return Err(Error::InvalidArgument("bitmap count must equal 2^k"));
        }
        let width = WORD_BITS - k;
        if width < 64 && bitmaps.iter().any(|b| b >> width != 0) {
            return Err(Error::InvalidArgument("bitmap has bits above the substream width"));
        }
        Ok(Self { k, bitmaps, hash })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn substreams(&self) -> usize {
        self.bitmaps.len()
    }

    /// Width of each substream bitmap.
    pub fn width(&self) -> u32 {
        WORD_BITS - self.k
    }

    pub fn hash_function(&self) -> HashFunction {
        self.hash
    }

    pub fn bitmaps(&self) -> &[u64] {
        &self.bitmaps
    }

    pub fn add(&mut self, element: &[u8]) {
        let w = self.hash.hash(element);
        self.add_word(w);
    }

    /// Routes a full-width word by its first `k` bits.
    pub fn add_word(&mut self, w: HashedWord) {
        // k <= MAX_SPLIT_BITS < 64 is enforced at construction.
        let (index, rest) = w.split(self.k).expect("k below word width");
        mark(&mut self.bitmaps[index as usize], rest);
    }

    /// Per-substream `R` values.
    pub fn ranks(&self) -> impl Iterator<Item = u32> + '_ {
        let width = self.width();
        self.bitmaps.iter().map(move |&b| leftmost_zero(b, width))
    }

    pub fn is_empty(&self) -> bool {
        self.bitmaps.iter().all(|&b| b == 0)
    }

    /// `(m / φ) * 2^(mean R)`, or 0 when no element was observed.
    pub fn estimate(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let m = self.bitmaps.len() as f64;
        let total: u64 = self.ranks().map(u64::from).sum();
        m / PHI * libm::exp2(total as f64 / m)
    }

    pub fn merge(&mut self, other: &PcsaSketch) -> Result<()> {
        if self.hash != other.hash {
            return Err(Error::Incompatible("hash seeds differ"));
        }
        if self.k != other.k {
            return Err(Error::Incompatible("substream counts differ"));
        }
        for (a, b) in self.bitmaps.iter_mut().zip(&other.bitmaps) {
            *a |= *b;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> HashedWord {
        HashedWord::from_prefix(u64::from_str_radix(s, 2).unwrap(), s.len() as u32).unwrap()
    }

    /// Renders the first `n` bitmap positions left to right.
    fn render(bitmap: u64, n: u32) -> alloc::string::String {
        (0..n).map(|i| if bitmap >> i & 1 == 1 { '1' } else { '0' }).collect()
    }

    #[test]
    fn worked_example() {
        let mut s = FmSketch::new(HashFunction::new(0));
        for w in ["10000", "11101", "00001", "11011", "01100", "10110", "10111", "00111"] {
            s.add_word(word(w));
        }
        assert_eq!(render(s.bitmap(), 5), "11101");
        assert_eq!(s.rank(), 3);
        assert!((s.estimate() - 8.0 / PHI).abs() < 1e-12);
        assert!((s.estimate() - 10.34).abs() < 0.01);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(leftmost_zero(0, 64), 0);
        assert_eq!(leftmost_zero(0b11101, 64), 1);
        assert_eq!(leftmost_zero(0b10111, 64), 3);
        assert_eq!(leftmost_zero(u64::MAX, 64), 64);
        assert_eq!(leftmost_zero(u64::MAX >> 2, 62), 62);
    }

    #[test]
    fn empty_estimates_are_zero() {
        assert_eq!(FmSketch::new(HashFunction::new(1)).estimate(), 0.0);
        assert_eq!(PcsaSketch::new(4, HashFunction::new(1)).unwrap().estimate(), 0.0);
    }

    #[test]
    fn sentinel_word_is_dropped() {
        let mut s = FmSketch::new(HashFunction::new(0));
        s.add_word(HashedWord::new(0));
        assert!(s.is_empty());
    }

    #[test]
    fn duplicates_do_not_change_bitmap() {
        let mut s = FmSketch::new(HashFunction::new(2));
        s.add(b"x");
        let before = s.clone();
        s.add(b"x");
        assert_eq!(s, before);
    }

    #[test]
    fn pcsa_single_substream_matches_fm() {
        let h = HashFunction::new(77);
        let mut fm = FmSketch::new(h);
        let mut pcsa = PcsaSketch::new(0, h).unwrap();
        for i in 0..3000u32 {
            fm.add(&i.to_le_bytes());
            pcsa.add(&i.to_le_bytes());
        }
        assert_eq!(fm.bitmap(), pcsa.bitmaps()[0]);
        assert_eq!(fm.estimate(), pcsa.estimate());
    }

    #[test]
    fn pcsa_routes_by_prefix() {
        let mut s = PcsaSketch::new(2, HashFunction::new(0)).unwrap();
        s.add_word(word("10110"));
        assert_eq!(s.bitmaps(), &[0, 0, 1, 0]);
        s.add_word(word("0001"));
        assert_eq!(s.bitmaps(), &[1 << 1, 0, 1, 0]);
    }

    #[test]
    fn merge_rejects_mismatch() {
        let mut a = PcsaSketch::new(3, HashFunction::new(1)).unwrap();
        let b = PcsaSketch::new(3, HashFunction::new(2)).unwrap();
        let c = PcsaSketch::new(4, HashFunction::new(1)).unwrap();
        assert!(matches!(a.merge(&b), Err(Error::Incompatible(_))));
        assert!(matches!(a.merge(&c), Err(Error::Incompatible(_))));
        let mut f = FmSketch::new(HashFunction::new(1));
        assert!(f.merge(&FmSketch::new(HashFunction::new(9))).is_err());
    }

    #[test]
    fn from_parts_validation() {
        let h = HashFunction::new(0);
        assert!(PcsaSketch::from_parts(2, h, vec![0; 3]).is_err());
        assert!(PcsaSketch::from_parts(2, h, vec![1 << 63, 0, 0, 0]).is_err());
        assert!(PcsaSketch::from_parts(2, h, vec![1 << 61, 0, 0, 0]).is_ok());
        assert!(PcsaSketch::new(MAX_SPLIT_BITS + 1, h).is_err());
    }
}
