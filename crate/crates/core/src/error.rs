use core::fmt;

use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(String),
    /// Adaptive quadrature stopped before reaching the requested tolerance.
    QuadratureNotConverged { estimate: f64, tolerance: f64 },
    /// `3^{π+|x|}` is not representable for this cube center.
    ScaleOverflow { center_norm: f64 },
    /// Two fields that must share a grid do not.
    GridMismatch,
    /// The time step violates the advective CFL limit.
    Cfl { courant: f64, limit: f64 },
    /// The solver state stopped being finite.
    NonFinite { time: f64 },
    /// `γ ≥ 1`: the dissipativity quadratic has no real distinct roots.
    NoRealRoots { gamma: f64 },
    /// The nonlinear constant cannot be estimated from this trajectory.
    MUndefined,
    /// The fitting window does not hold enough samples.
    WindowTooShort { samples: usize, required: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::QuadratureNotConverged {
                estimate,
                tolerance,
            } => write!(
                f,
                "quadrature did not converge: error estimate {estimate:e} > tolerance {tolerance:e}"
            ),
            Error::ScaleOverflow { center_norm } => {
                write!(f, "3^(pi+|x|) overflows for center norm {center_norm}")
            }
            Error::GridMismatch => write!(f, "fields are not sampled on the same grid"),
            Error::Cfl { courant, limit } => {
                write!(
                    f,
                    "CFL violated: courant number {courant:.4} exceeds {limit}"
                )
            }
            Error::NonFinite { time } => write!(f, "solver state became non-finite at t = {time}"),
            Error::NoRealRoots { gamma } => {
                write!(f, "no real distinct roots: gamma = {gamma} >= 1")
            }
            Error::MUndefined => write!(f, "M undefined: trajectory has no nonzero checkpoint"),
            Error::WindowTooShort { samples, required } => write!(
                f,
                "fit window too short: {samples} samples, at least {required} required"
            ),
        }
    }
}

impl core::error::Error for Error {}
