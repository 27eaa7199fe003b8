use std::fmt;
use std::time::Duration;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which condition on a `(q, k)` pair was violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamViolation {
    /// `k >= 2` is required.
    KTooSmall { k: u64 },
    /// `k` must divide `q - 1`.
    NotADivisor { k: u64, q: u64 },
    /// For odd `q` the valency `(q - 1) / k` must be even.
    Parity { q: u64, k: u64, valency: u64 },
    /// `q` is not a prime power.
    NotPrimePower { q: u64 },
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamViolation::KTooSmall { k } => write!(f, "k = {k} violates k >= 2"),
            ParamViolation::NotADivisor { k, q } => {
                write!(f, "divisibility violation: k = {k} does not divide q - 1 = {}", q - 1)
            }
            ParamViolation::Parity { q, k, valency } => {
                write!(f, "parity violation: q = {q} is odd but (q - 1)/k = {valency} is odd (k = {k})")
            }
            ParamViolation::NotPrimePower { q } => write!(f, "{q} is not a prime power"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("size {value} exceeds the configured bound {bound}")]
    BoundExceeded { value: u64, bound: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete logarithm of zero")]
    ZeroArgument,
    #[error("{a} does not divide the extension degree {degree}")]
    NotADivisor { a: u32, degree: u32 },
    #[error("invalid field element: {0}")]
    InvalidElement(String),
    #[error("invalid field description: {0}")]
    InvalidField(String),

    #[error("connection set is not closed under negation")]
    NotSymmetricConnectionSet,
    #[error("connection set contains zero")]
    ZeroInConnectionSet,
    #[error("index {index} out of range 0..{len}")]
    OutOfRange { index: usize, len: usize },
    #[error("graph6: {0}")]
    Graph6(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(ParamViolation),
    #[error("graph is connected; nothing to decompose")]
    IsConnected,
    #[error("parameters do not give a Hamming graph")]
    NotHamming,
    #[error("F_p-span of the connection set is not a subfield: {0}")]
    SpanNotSubfield(String),
    #[error("candidate Hamming basis is singular")]
    SingularBasis,

    #[error("-1 is not in S(k); relations would not be symmetric")]
    SymmetryViolation,
    #[error(
        "scheme axiom fails: pair ({x}, {y}) in class {h} has {found} (i={i}, j={j}) common points, representative has {expected}"
    )]
    NotAScheme { h: usize, i: usize, j: usize, x: usize, y: usize, expected: u64, found: u64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("group is not transitive")]
    NotTransitive,

    #[error("search exceeded the time limit of {0:?}")]
    Timeout(Duration),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}
