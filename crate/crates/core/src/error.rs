use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("incompatible sketches: {0}")]
    Incompatible(&'static str),
    #[error("estimate undefined: {0}")]
    Undefined(&'static str),
    #[error("quadrature did not converge (achieved error {achieved:e}, tolerance {tolerance:e})")]
    NonConvergent { achieved: f64, tolerance: f64 },
}
