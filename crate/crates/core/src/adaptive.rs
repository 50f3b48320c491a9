//! Adaptive (distinct) sampling.
//!
//! The sample keeps every distinct element whose hash starts with `0^d`, up
//! to `m` of them. On overflow the depth `d` grows by one and elements that
//! fail the longer prefix are evicted, so each distinct element ends up in
//! the cache with probability `2^-d` independently of how often it occurs.
//! `2^d * |cache|` estimates the cardinality.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::hashcore::HashFunction;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry {
    frequency: u64,
    rho: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveSample {
    cache: BTreeMap<Vec<u8>, Entry>,
    depth: u32,
    capacity: usize,
    hash: HashFunction,
}

impl AdaptiveSample {
    pub fn new(capacity: usize, hash: HashFunction) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidArgument("capacity must be at least 1"));
        }
        Ok(Self {
            cache: BTreeMap::new(),
            depth: 0,
            capacity,
            hash,
        })
    }

    /// Rebuilds a sample from stored `(element, frequency)` pairs.
    ///
    /// Every element must pass the depth-`d` prefix test and there may be at
    /// most `capacity` of them.
    pub fn from_parts<I>(capacity: usize, hash: HashFunction, depth: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, u64)>,
    {
        let mut s = Self::new(capacity, hash)?;
        s.depth = depth;
        for (element, frequency) in entries {
            if frequency == 0 {
                return Err(Error::InvalidArgument("stored frequency must be positive"));
            }
            let rho = hash.hash(&element).rho();
            if rho < depth {
                return Err(Error::InvalidArgument("stored element fails the prefix test"));
            }
            if s.cache.insert(element, Entry { frequency, rho }).is_some() {
                return Err(Error::InvalidArgument("duplicate stored element"));
            }
        }
        if s.cache.len() > capacity {
            return Err(Error::InvalidArgument("more stored elements than capacity"));
        }
        Ok(s)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }

    pub fn hash_function(&self) -> HashFunction {
        self.hash
    }

    pub fn add(&mut self, element: &[u8]) {
        if let Some(e) = self.cache.get_mut(element) {
            e.frequency += 1;
            return;
        }
        let rho = self.hash.hash(element).rho();
        if rho >= self.depth {
            self.cache.insert(element.to_vec(), Entry { frequency: 1, rho });
            self.shrink();
        }
    }

    fn shrink(&mut self) {
        while self.cache.len() > self.capacity {
            self.depth += 1;
            let depth = self.depth;
            self.cache.retain(|_, e| e.rho >= depth);
        }
    }

    /// `2^d * |cache|`.
    pub fn estimate(&self) -> f64 {
        libm::exp2(self.depth as f64) * self.cache.len() as f64
    }

    /// Cached elements with their frequencies, in byte order.
    pub fn sample(&self) -> impl ExactSizeIterator<Item = (&[u8], u64)> + '_ {
        self.cache.iter().map(|(k, e)| (k.as_slice(), e.frequency))
    }

    pub fn frequency(&self, element: &[u8]) -> Option<u64> {
        self.cache.get(element).map(|e| e.frequency)
    }

    /// Fraction of cached elements whose frequency satisfies `pred`.
    pub fn class_fraction<F: Fn(u64) -> bool>(&self, pred: F) -> Result<f64> {
        if self.cache.is_empty() {
            return Err(Error::Undefined("class fraction of an empty sample"));
        }
        let hits = self.cache.values().filter(|e| pred(e.frequency)).count();
        Ok(hits as f64 / self.cache.len() as f64)
    }

    /// Elements seen exactly once.
    pub fn mice_fraction(&self) -> Result<f64> {
        self.class_fraction(|f| f == 1)
    }

    /// Elements seen more than `threshold` times.
    pub fn elephant_fraction(&self, threshold: u64) -> Result<f64> {
        self.class_fraction(|f| f > threshold)
    }

    /// Folds `other` into `self`: both caches are cut to the larger depth,
    /// frequencies of shared elements add up, then the overflow loop runs.
    pub fn merge(&mut self, other: &AdaptiveSample) -> Result<()> {
        if self.hash != other.hash {
            return Err(Error::Incompatible("hash seeds differ"));
        }
        if self.capacity != other.capacity {
            return Err(Error::Incompatible("capacities differ"));
        }
        let depth = self.depth.max(other.depth);
        self.depth = depth;
        self.cache.retain(|_, e| e.rho >= depth);
        for (k, e) in other.cache.iter().filter(|(_, e)| e.rho >= depth) {
            self.cache
                .entry(k.clone())
                .and_modify(|mine| mine.frequency += e.frequency)
                .or_insert(*e);
        }
        self.shrink();
        Ok(())
    }
}
