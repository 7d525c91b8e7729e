use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("point is off the hyperboloid: |kappa<x,x> - 1| = {violation:e}")]
    OffHyperboloid { violation: f64 },

    #[error("degenerate immersion at {at:?}: metric determinant {det:e}")]
    Degenerate { at: [f64; 3], det: f64 },

    #[error("parameter domain cannot cover the extrinsic ball of radius {s_max}: {reason}")]
    Truncation { s_max: f64, reason: String },

    #[error("operation requires {0}")]
    Unsupported(String),

    #[error("missing topology metadata: {0}")]
    MissingMetadata(&'static str),

    #[error("test function support [{lo}, {hi}] is not covered by the profile (s_max = {s_max})")]
    EmptySupport { lo: f64, hi: f64, s_max: f64 },

    #[error("Rayleigh quotient denominator vanished at R = {0}")]
    ZeroDenominator(f64),

    #[error("non-positive weight {value:e} at t = {t}")]
    NonPositiveWeight { t: f64, value: f64 },

    #[error("eigenvalue bisection did not converge in {0} iterations")]
    NoConvergence(usize),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;

/// Pads a parameter point into the fixed-size array carried by [`Error::Degenerate`].
pub(crate) fn point3(u: &[f64]) -> [f64; 3] {
    let mut out = [f64::NAN; 3];
    for (o, v) in out.iter_mut().zip(u) {
        *o = *v;
    }
    out
}
