use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("node {node} is out of range for a graph of {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("input must not be empty")]
    EmptyInput,
    #[error("value at index {index} is negative or not finite")]
    InvalidValue { index: usize },
    #[error("series {index} has {found} periods, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
}

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}
