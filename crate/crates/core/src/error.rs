use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A problem size exceeds an index type or a configured solver limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("numerical breakdown at step {step}: {reason}")]
    NumericalBreakdown { step: usize, reason: String },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
