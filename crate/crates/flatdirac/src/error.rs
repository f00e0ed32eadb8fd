use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} outside the supported range")]
    UnsupportedDimension(usize),

    #[error("matrix has determinant -1; no spin lift exists")]
    NotOrientable,

    #[error("element is not in the spin group: {0}")]
    NotInSpin(String),

    #[error("point group closure exceeds {0} elements")]
    InfinitePointGroup(usize),

    #[error("translation lattice is strictly larger than Z^n (coset {0})")]
    LatticeMismatch(String),

    #[error("torsion element in coset {0}")]
    Torsion(String),

    #[error("unsupported translation denominator {0}")]
    BadDenominator(i64),

    #[error("invalid spin structure: {0}")]
    InvalidSpinStructure(String),

    #[error("holonomy is not elementary abelian of exponent 2")]
    NotZ2k,

    #[error("unsupported holonomy: {0}")]
    UnsupportedHolonomy(String),

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("multiplicity is not a non-negative integer: {0}")]
    NonIntegral(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("pole of the Hurwitz zeta function at s = 1")]
    Pole,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("p = {0} is not a prime congruent to 3 mod 4")]
    NotAdmissiblePrime(u64),

    #[error("precision guard: {0}")]
    Precision(String),

    #[error("degenerate sign comparison: {0}")]
    Degenerate(String),

    #[error("unknown group name: {0}")]
    UnknownGroup(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::NotOrientable => "not_orientable",
            Error::NotInSpin(_) => "not_in_spin",
            Error::InfinitePointGroup(_) => "infinite_point_group",
            Error::LatticeMismatch(_) => "lattice_mismatch",
            Error::Torsion(_) => "torsion",
            Error::BadDenominator(_) => "bad_denominator",
            Error::InvalidSpinStructure(_) => "invalid_spin_structure",
            Error::NotZ2k => "not_z2k",
            Error::UnsupportedHolonomy(_) => "unsupported_holonomy",
            Error::InvalidCharacter(_) => "invalid_character",
            Error::NonIntegral(_) => "non_integral",
            Error::Budget(_) => "budget",
            Error::Pole => "pole",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotAdmissiblePrime(_) => "not_admissible_prime",
            Error::Precision(_) => "precision",
            Error::Degenerate(_) => "degenerate",
            Error::UnknownGroup(_) => "unknown_group",
            Error::Parse(_) => "parse",
            Error::Internal(_) => "internal",
        }
    }
}
