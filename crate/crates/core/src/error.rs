use thiserror::Error;

/// Errors raised by the tree, group, dynamics and sieve routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid tree shape: arity {arity}, height {height}")]
    InvalidShape { arity: usize, height: usize },

    #[error("tree shapes differ: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("invalid node address: {0}")]
    InvalidAddress(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("too large: {what} has {size} elements, limit is {limit}")]
    TooLarge {
        what: String,
        size: String,
        limit: usize,
    },

    #[error("{what} = {value} is out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: i128,
        range: String,
    },

    #[error("automorphism does not fix node {0}")]
    NodeNotFixed(String),

    #[error("invalid branch: {0}")]
    InvalidBranch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate map: {0}")]
    Degenerate(String),

    #[error("orbit hit a pole at step {step}")]
    Pole { step: usize },

    #[error("parameter must be nonzero: {0}")]
    ZeroParameter(&'static str),

    #[error("{residue} is not invertible modulo {modulus}")]
    NotInvertible { residue: u64, modulus: u64 },

    #[error("growth guard: {0}")]
    Guard(String),

    #[error("inexact division: {0}")]
    InexactDivision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
