use super::quadrature::adaptive_simpson;
use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bias-correction constant of the bitmap statistic, `E[R] ≈ log2(φ n)`.
///
/// Matches [`phi_product`] with `2^20` factors to the last printed digit.
pub const PHI: f64 = 0.773_516_290_908_46;

/// Result of a truncated series, product or quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantResult {
    pub value: f64,
    /// Factors, or integrand evaluations for quadrature.
    pub terms_used: u64,
    /// Heuristic: change from halving the work, or the summed Richardson
    /// estimates for quadrature. Not a rigorous bound.
    pub error_bound: f64,
}

/// Number of 1-bits in the binary representation of `p`.
#[inline]
pub fn nu(p: u64) -> u32 {
    p.count_ones()
}

#[inline]
fn sign(p: u64) -> f64 {
    if nu(p).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Default)]
struct Sum {
    total: f64,
    carry: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.total + x;
        if libm::fabs(self.total) >= libm::fabs(x) {
            self.carry += (self.total - t) + x;
        } else {
            self.carry += (x - t) + self.total;
        }
        self.total = t;
    }

    fn get(&self) -> f64 {
        self.total + self.carry
    }
}

/// Log of the grouped factor `[(4p+1)(4p+2) / ((4p)(4p+3))]`, i.e.
/// `ln(1 + 2 / (4p (4p+3)))`.
#[inline]
fn grouped_log(p: u64) -> f64 {
    let p = p as f64;
    libm::log1p(2.0 / (4.0 * p * (4.0 * p + 3.0)))
}

/// Sums `log_term(p)` for `p = 1..=terms`, also reporting the partial sum at
/// `terms / 2` for the convergence heuristic.
fn log_partial_sums(terms: u64, log_term: impl Fn(u64) -> f64) -> (f64, f64) {
    let half = terms / 2;
    let mut sum = Sum::default();
    let mut at_half = 0.0;
    for p in 1..=terms {
        sum.add(log_term(p));
        if p == half {
            at_half = sum.get();
        }
    }
    (sum.get(), at_half)
}

fn check_terms(terms: u64) -> Result<()> {
    if terms == 0 {
        return Err(Error::InvalidArgument("at least one term is required"));
    }
    Ok(())
}

/// `φ = 2^(-1/2) e^γ (2/3) Π_{p>=1} [(4p+1)(4p+2) / ((4p)(4p+3))]^((-1)^ν(p))`,
/// truncated after `terms` factors.
pub fn phi_product(terms: u64) -> Result<ConstantResult> {
    check_terms(terms)?;
    let prefactor = libm::exp(EULER_GAMMA) / libm::sqrt(2.0) * (2.0 / 3.0);
    let (full, half) = log_partial_sums(terms, |p| sign(p) * grouped_log(p));
    let value = prefactor * libm::exp(full);
    Ok(ConstantResult {
        value,
        terms_used: terms,
        error_bound: libm::fabs(value - prefactor * libm::exp(half)),
    })
}

/// `φ = (e^γ / √2) Π_{p>=1} [(2p+1) / (2p)]^((-1)^ν(p))`, truncated after
/// `terms` factors. No pairing or acceleration is applied, so this stays an
/// independent route from [`phi_product`].
pub fn phi_slow_product(terms: u64) -> Result<ConstantResult> {
    check_terms(terms)?;
    let prefactor = libm::exp(EULER_GAMMA) / libm::sqrt(2.0);
    let (full, half) = log_partial_sums(terms, |p| sign(p) * libm::log1p(0.5 / p as f64));
    let value = prefactor * libm::exp(full);
    Ok(ConstantResult {
        value,
        terms_used: terms,
        error_bound: libm::fabs(value - prefactor * libm::exp(half)),
    })
}

/// Both sides of the pairing identity for index `p >= 1`:
///
/// `Π_{k ∈ {2p, 2p+1}} [(2k+1)/(2k)]^((-1)^ν(k))` and
/// `[(4p+1)(4p+2) / ((4p)(4p+3))]^((-1)^ν(2p))`.
pub fn pairing_identity(p: u64) -> (f64, f64) {
    let factor = |k: u64| {
        let k = k as f64;
        (2.0 * k + 1.0) / (2.0 * k)
    };
    let pow = |x: f64, s: f64| if s > 0.0 { x } else { 1.0 / x };
    let lhs = pow(factor(2 * p), sign(2 * p)) * pow(factor(2 * p + 1), sign(2 * p + 1));
    let pf = p as f64;
    let bracket = ((4.0 * pf + 1.0) * (4.0 * pf + 2.0)) / ((4.0 * pf) * (4.0 * pf + 3.0));
    (lhs, pow(bracket, sign(2 * p)))
}

/// Settings for [`xi_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiQuadrature {
    /// Upper integration limit. The tail beyond 30 is below `1e-12`.
    pub max_x: f64,
    /// Absolute tolerance on the integral.
    pub tolerance: f64,
    /// Bisection depth limit per dyadic panel.
    pub max_depth: u32,
}

impl Default for XiQuadrature {
    fn default() -> Self {
        Self {
            max_x: 50.0,
            tolerance: 1e-12,
            max_depth: 40,
        }
    }
}

/// `Π_{j>=0} (1 - e^(-x 2^(j+1)))`, stopping once factors are within
/// `1e-16` of one.
fn splitting_product(x: f64) -> f64 {
    let mut prod = 1.0;
    let mut scale = 2.0;
    loop {
        let e = libm::exp(-x * scale);
        prod *= -libm::expm1(-x * scale);
        if e < 1e-16 || prod == 0.0 {
            return prod;
        }
        scale *= 2.0;
    }
}

fn xi_integrand(x: f64) -> f64 {
    let prod = splitting_product(x);
    if prod == 0.0 {
        return 0.0;
    }
    libm::exp(-x) * prod * libm::log(x) / x
}

/// `ξ` from `log2 ξ = -1 - (1/ln²2) ∫_0^∞ e^-x Π_{j>=0}(1 - e^(-x 2^(j+1))) (ln x / x) dx`.
///
/// The integral is split into dyadic panels; the lower end starts where the
/// integrand has vanished below `1e-30 / x`.
pub fn xi_integral(params: &XiQuadrature) -> Result<ConstantResult> {
    if !(params.max_x > 0.0 && params.max_x.is_finite()) {
        return Err(Error::InvalidArgument("max_x must be positive and finite"));
    }
    if !(params.tolerance > 0.0 && params.tolerance.is_finite()) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    // ln x vanishes at 1, so the scan starts below it.
    let mut lo = params.max_x.min(0.5);
    while libm::fabs(xi_integrand(lo)) * lo > 1e-30 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::NonConvergent {
                achieved: f64::NAN,
                tolerance: params.tolerance,
            });
        }
    }

    let mut panels = alloc::vec::Vec::new();
    let mut a = lo;
    while a < params.max_x {
        let b = (2.0 * a).min(params.max_x);
        panels.push((a, b));
        a = b;
    }
    let per_panel = params.tolerance / panels.len() as f64;
    let mut total = Sum::default();
    let mut error = 0.0;
    let mut evaluations = 0u64;
    for (a, b) in panels {
        let o = adaptive_simpson(&xi_integrand, a, b, per_panel, params.max_depth);
        evaluations += o.evaluations as u64;
        if !o.finite || o.exhausted {
            return Err(Error::NonConvergent {
                achieved: if o.finite { o.error } else { f64::NAN },
                tolerance: params.tolerance,
            });
        }
        total.add(o.value);
        error += o.error;
    }
    let ln2 = core::f64::consts::LN_2;
    let log2_xi = -1.0 - total.get() / (ln2 * ln2);
    let value = libm::exp2(log2_xi);
    Ok(ConstantResult {
        value,
        terms_used: evaluations,
        // d(xi)/d(I) = -xi / ln 2
        error_bound: value / ln2 * error,
    })
}
