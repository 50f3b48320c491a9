//! Constants and exact oracles behind the estimators.
//!
//! The bias-correction constant `φ` is computed three ways: the grouped
//! product over `ν(p)` ([`phi_product`]), the slowly converging ungrouped
//! product ([`phi_slow_product`]) and the splitting-process integral
//! ([`xi_integral`]). The oracles give exact laws of the counter state and of
//! the bitmap statistic `R` for small inputs.
//!
//! Measured convergence (absolute error against [`PHI`]):
//!
//! | route              | work       | error    |
//! |--------------------|------------|----------|
//! | `phi_product`      | 64         | 2.3e-5   |
//! | `phi_product`      | 2^10       | 9.2e-8   |
//! | `phi_product`      | 2^16       | 2.3e-11  |
//! | `phi_slow_product` | 2^16       | 5.9e-6   |
//! | `phi_slow_product` | 2^20       | 3.7e-7   |
//! | `phi_slow_product` | 2^24       | 2.3e-8   |
//! | `xi_integral`      | 6433 evals | 1.5e-14  |
//!
//! The grouped product error falls like `1/P^2`, the ungrouped one like `1/P`.

mod constants;
mod oracles;
mod quadrature;

pub use constants::{
    nu, pairing_identity, phi_product, phi_slow_product, xi_integral, ConstantResult,
    XiQuadrature, EULER_GAMMA, PHI,
};
pub use oracles::{
    fm_pgf_mean, fm_pgf_means, fm_rank_distribution, fp_state_distribution,
    morris_state_distribution, DistributionVector, FpStateLaw, MorrisStateLaw, FM_ORACLE_LIMIT,
};
