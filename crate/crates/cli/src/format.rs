//! Versioned little-endian byte layouts for sketches and samples.
//!
//! Bitmap sketches (`FmSketch` is the `k = 0` case):
//!
//! ```text
//! offset  size   field
//! 0       4      magic "SCFM"
//! 4       1      version (1)
//! 5       1      k
//! 6       1      word width L (64)
//! 7       8      hash seed, u64 LE
//! 15      8*2^k  bitmaps, u64 LE each, bit i = rank i
//! ```
//!
//! Adaptive samples:
//!
//! ```text
//! 0       4      magic "SCAS"
//! 4       1      version (1)
//! 5       8      hash seed, u64 LE
//! 13      8      capacity m, u64 LE
//! 21      4      depth d, u32 LE
//! 25      8      entry count, u64 LE
//! 33      ...    entries: element length u32 LE, element bytes, frequency u64 LE
//! ```

use streamcount::adaptive::AdaptiveSample;
use streamcount::fm::{FmSketch, PcsaSketch};
use streamcount::hashcore::{HashFunction, WORD_BITS};
use thiserror::Error;

pub const BITMAP_MAGIC: [u8; 4] = *b"SCFM";
pub const SAMPLE_MAGIC: [u8; 4] = *b"SCAS";
pub const VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("unsupported word width {0}")]
    UnsupportedWidth(u8),
    #[error("expected a single bitmap (k = 0), found k = {0}")]
    NotSingleBitmap(u8),
    #[error("input truncated")]
    Truncated,
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("invalid payload: {0}")]
    Invalid(#[from] streamcount::Error),
}

/// Detected payload type of a serialized file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Bitmaps,
    Sample,
}

pub fn detect(bytes: &[u8]) -> Result<Kind, FormatError> {
    match bytes.get(..4) {
        Some(m) if m == BITMAP_MAGIC => Ok(Kind::Bitmaps),
        Some(m) if m == SAMPLE_MAGIC => Ok(Kind::Sample),
        Some(_) => Err(FormatError::BadMagic),
        None => Err(FormatError::Truncated),
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.buf.len() < n {
            return Err(FormatError::Truncated);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(self) -> Result<(), FormatError> {
        match self.buf.len() {
            0 => Ok(()),
            n => Err(FormatError::TrailingBytes(n)),
        }
    }
}

fn header(r: &mut Reader<'_>, magic: [u8; 4]) -> Result<(), FormatError> {
    if r.take(4)? != magic {
        return Err(FormatError::BadMagic);
    }
    match r.u8()? {
        VERSION => Ok(()),
        v => Err(FormatError::UnsupportedVersion(v)),
    }
}

fn encode_raw_bitmaps(k: u32, seed: u64, bitmaps: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(15 + 8 * bitmaps.len());
    out.extend_from_slice(&BITMAP_MAGIC);
    out.push(VERSION);
    out.push(k as u8);
    out.push(WORD_BITS as u8);
    out.extend_from_slice(&seed.to_le_bytes());
    for b in bitmaps {
        out.extend_from_slice(&b.to_le_bytes());
    }
    out
}

pub fn encode_pcsa(s: &PcsaSketch) -> Vec<u8> {
    encode_raw_bitmaps(s.k(), s.hash_function().seed(), s.bitmaps())
}

pub fn encode_fm(s: &FmSketch) -> Vec<u8> {
    encode_raw_bitmaps(0, s.hash_function().seed(), &[s.bitmap()])
}

pub fn decode_pcsa(bytes: &[u8]) -> Result<PcsaSketch, FormatError> {
    let mut r = Reader { buf: bytes };
    header(&mut r, BITMAP_MAGIC)?;
    let k = r.u8()?;
    let width = r.u8()?;
    if u32::from(width) != WORD_BITS {
        return Err(FormatError::UnsupportedWidth(width));
    }
    let seed = r.u64()?;
    if u32::from(k) > streamcount::fm::MAX_SPLIT_BITS {
        return Err(streamcount::Error::InvalidArgument("k exceeds MAX_SPLIT_BITS").into());
    }
    let count = 1usize << k;
    let mut bitmaps = Vec::with_capacity(count);
    for _ in 0..count {
        bitmaps.push(r.u64()?);
    }
    r.finish()?;
    Ok(PcsaSketch::from_parts(u32::from(k), HashFunction::new(seed), bitmaps)?)
}

pub fn decode_fm(bytes: &[u8]) -> Result<FmSketch, FormatError> {
    let s = decode_pcsa(bytes)?;
    if s.k() != 0 {
        return Err(FormatError::NotSingleBitmap(s.k() as u8));
    }
    Ok(FmSketch::from_parts(s.hash_function(), s.bitmaps()[0]))
}

pub fn encode_sample(s: &AdaptiveSample) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&SAMPLE_MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&s.hash_function().seed().to_le_bytes());
    out.extend_from_slice(&(s.capacity() as u64).to_le_bytes());
    out.extend_from_slice(&s.depth().to_le_bytes());
    out.extend_from_slice(&(s.len() as u64).to_le_bytes());
    for (x, f) in s.sample() {
        out.extend_from_slice(&(x.len() as u32).to_le_bytes());
        out.extend_from_slice(x);
        out.extend_from_slice(&f.to_le_bytes());
    }
    out
}

pub fn decode_sample(bytes: &[u8]) -> Result<AdaptiveSample, FormatError> {
    let mut r = Reader { buf: bytes };
    header(&mut r, SAMPLE_MAGIC)?;
    let seed = r.u64()?;
    let capacity = usize::try_from(r.u64()?)
        .map_err(|_| streamcount::Error::InvalidArgument("capacity overflows usize"))?;
    let depth = r.u32()?;
    let count = r.u64()?;
    let mut entries = Vec::new();
    for _ in 0..count {
        let len = r.u32()? as usize;
        let element = r.take(len)?.to_vec();
        let frequency = r.u64()?;
        entries.push((element, frequency));
    }
    r.finish()?;
    Ok(AdaptiveSample::from_parts(capacity, HashFunction::new(seed), depth, entries)?)
}
