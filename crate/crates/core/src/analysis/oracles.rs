use alloc::vec;
use alloc::vec::Vec;

use crate::morris::{fp_value, morris_value};
use crate::{Error, Result};

/// Largest `n` accepted by the bitmap-statistic oracles.
pub const FM_ORACLE_LIMIT: usize = 4096;

/// Probability law over a non-negative integer (counter value, state or rank).
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    probs: Vec<f64>,
}

impl DistributionVector {
    pub fn point_mass(at: usize) -> Self {
        let mut probs = vec![0.0; at + 1];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs.get(i).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σ_i p(i) f(i)`, skipping zero-probability outcomes.
    pub fn expect<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| p * f(i))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|i| i as f64)
    }

    fn trim(&mut self) {
        while self.probs.len() > 1 && self.probs.last() == Some(&0.0) {
            self.probs.pop();
        }
    }
}

/// Exact law of a Morris counter, advanced one increment at a time.
///
/// `p_{N+1}(c) = p_N(c) (1 - q^-c) + p_N(c-1) q^-(c-1)`, starting from a
/// point mass at `C = 1`.
#[derive(Debug, Clone)]
pub struct MorrisStateLaw {
    q: f64,
    steps: u64,
    law: DistributionVector,
}

impl MorrisStateLaw {
    pub fn new(q: f64) -> Result<Self> {
        if q <= 1.0 || !q.is_finite() {
            return Err(Error::InvalidArgument("counter base must be a finite q > 1"));
        }
        Ok(Self {
            q,
            steps: 0,
            law: DistributionVector::point_mass(1),
        })
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn law(&self) -> &DistributionVector {
        &self.law
    }

    pub fn step(&mut self) {
        let old = &self.law.probs;
        let mut next = vec![0.0; old.len() + 1];
        for (c, &p) in old.iter().enumerate().skip(1) {
            if p == 0.0 {
                continue;
            }
            let up = libm::pow(self.q, -(c as f64));
            next[c] += p * (1.0 - up);
            next[c + 1] += p * up;
        }
        self.law.probs = next;
        self.law.trim();
        self.steps += 1;
    }

    /// `E[f(C)]` under the current law.
    pub fn expected_estimate(&self) -> f64 {
        let q = self.q;
        self.law.expect(|c| morris_value(c as u32, q))
    }
}

/// Law of `C` after `n` increments with base `q`.
pub fn morris_state_distribution(n: u64, q: f64) -> Result<DistributionVector> {
    let mut law = MorrisStateLaw::new(q)?;
    for _ in 0..n {
        law.step();
    }
    Ok(law.law)
}

/// Exact law of the floating-point counter state `M`.
#[derive(Debug, Clone)]
pub struct FpStateLaw {
    d: u32,
    steps: u64,
    law: DistributionVector,
}

impl FpStateLaw {
    pub fn new(d: u32) -> Result<Self> {
        if d == 0 || d > crate::morris::MAX_SIGNIFICAND_BITS {
            return Err(Error::InvalidArgument("significand width must be in 1..=32"));
        }
        Ok(Self {
            d,
            steps: 0,
            law: DistributionVector::point_mass(0),
        })
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn law(&self) -> &DistributionVector {
        &self.law
    }

    pub fn step(&mut self) {
        let old = &self.law.probs;
        let mut next = vec![0.0; old.len() + 1];
        for (m, &p) in old.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let t = (m as u64 >> self.d) as f64;
            let up = libm::exp2(-t);
            next[m] += p * (1.0 - up);
            next[m + 1] += p * up;
        }
        self.law.probs = next;
        self.law.trim();
        self.steps += 1;
    }

    pub fn expected_estimate(&self) -> f64 {
        let d = self.d;
        self.law.expect(|m| fp_value(m as u64, d))
    }
}

/// Law of `M` after `n` increments with significand width `d`.
pub fn fp_state_distribution(n: u64, d: u32) -> Result<DistributionVector> {
    let mut law = FpStateLaw::new(d)?;
    for _ in 0..n {
        law.step();
    }
    Ok(law.law)
}

/// `ln(i!)` for `i = 0..=n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    let mut carry = 0.0f64;
    out.push(0.0);
    for i in 1..=n {
        // Kahan-compensated running sum of ln i.
        let y = libm::log(i as f64) - carry;
        let t = acc + y;
        carry = (t - acc) - y;
        acc = t;
        out.push(acc);
    }
    out
}

/// Row `n` of `C(n, j) / 2^n`, computed in log space.
fn binomial_half_row(n: usize, lf: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let ln2n = n as f64 * core::f64::consts::LN_2;
    (0..=n).map(move |j| libm::exp(lf[n] - lf[j] - lf[n - j] - ln2n))
}

fn check_oracle_n(n: usize) -> Result<()> {
    if n > FM_ORACLE_LIMIT {
        return Err(Error::InvalidArgument("n exceeds FM_ORACLE_LIMIT"));
    }
    Ok(())
}

/// `E_j[R]` for `j = 0..=n_max`.
///
/// Splitting on the first hash bit: `R = 0` when no word starts with 1
/// (probability `2^-n`); otherwise the `n - k` words that start with 0
/// (`k >= 1` of them start with 1) determine the rest, giving
/// `F_n(u) = 2^-n + u Σ_{k=1..n} C(n,k) 2^-n F_{n-k}(u)` and therefore
/// `E_n[R] = 1 - 2^-n + Σ_{j<n} C(n,j) 2^-n E_j[R]`.
pub fn fm_pgf_means(n_max: usize) -> Result<Vec<f64>> {
    check_oracle_n(n_max)?;
    let lf = log_factorials(n_max);
    let mut means = Vec::with_capacity(n_max + 1);
    means.push(0.0);
    for n in 1..=n_max {
        let mut acc = 1.0 - libm::exp2(-(n as f64));
        for (j, w) in binomial_half_row(n, &lf).take(n).enumerate() {
            acc += w * means[j];
        }
        means.push(acc);
    }
    Ok(means)
}

/// Exact `E_n[R]` for `1 <= n <= FM_ORACLE_LIMIT`.
pub fn fm_pgf_mean(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1"));
    }
    Ok(fm_pgf_means(n)?[n])
}

/// Exact law of `R` over `n` distinct elements, from the same recursion as
/// [`fm_pgf_means`] (coefficients of `F_n(u)`).
pub fn fm_rank_distribution(n: usize) -> Result<DistributionVector> {
    check_oracle_n(n)?;
    let lf = log_factorials(n);
    // laws[j][r] = P_j(R = r); R <= j since each level needs a new element.
    let mut laws: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    laws.push(vec![1.0]);
    for size in 1..=n {
        let mut law = vec![0.0; size + 1];
        law[0] = libm::exp2(-(size as f64));
        for (j, w) in binomial_half_row(size, &lf).take(size).enumerate() {
            for (r, &p) in laws[j].iter().enumerate() {
                law[r + 1] += w * p;
            }
        }
        while law.len() > 1 && law.last().is_some_and(|&p| p < 1e-300) {
            law.pop();
        }
        laws.push(law);
    }
    let mut out = DistributionVector {
        probs: laws.pop().expect("n + 1 laws"),
    };
    out.trim();
    Ok(out)
}
