use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration too large: {count} subgroups exceeds the bound of {bound}")]
    EnumerationTooLarge { count: u128, bound: u128 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("invalid cipher: {0}")]
    InvalidCipher(String),

    #[error("round {round} is not proper: Γ_h = ⟨ρ, T(V)⟩ needs every vector to occur as a round key for that round")]
    RoundNotProper { round: usize },

    #[error("unknown key index {0}")]
    UnknownKey(usize),

    #[error("group is not transitive (orbit of 0 has {orbit} of {degree} points)")]
    Intransitive { orbit: usize, degree: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
