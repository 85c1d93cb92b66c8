use std::fmt;

use sdnse_core::Error as CoreError;

/// Outcome classes that map onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, malformed config, missing files: exit 1.
    Usage(anyhow::Error),
    /// A check ran and failed, or the computation aborted: exit 2.
    Assertion(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Assertion(_) => 2,
        }
    }

    pub fn assertion(msg: impl Into<String>) -> Self {
        Failure::Assertion(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) => write!(f, "error: {e:#}"),
            Failure::Assertion(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.into())
    }
}

/// Argument and grid errors are usage errors; numerical aborts are failures.
impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument(_) | CoreError::GridMismatch => {
                Failure::Usage(anyhow::anyhow!(e))
            }
            other => Failure::Assertion(other.to_string()),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// `anyhow::ensure!` for functions returning [`Outcome`]: a usage error.
#[macro_export]
macro_rules! require {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::Failure::Usage(anyhow::anyhow!($($arg)+)));
        }
    };
}
