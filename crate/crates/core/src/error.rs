use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("p = 2 is the ramified finite place of the quaternion algebra")]
    RamifiedPlace,

    #[error("precision {digits} at p = {p} exceeds the supported range of the residue arithmetic")]
    PrecisionTooLarge { p: u64, digits: u32 },

    #[error("element is indistinguishable from zero at the working precision")]
    IndistinguishableFromZero,

    #[error("element is not a p-adic unit")]
    NotAUnit,

    #[error("factorization leaves the big cell or the integral factors: {0}")]
    NotFactorizable(String),

    #[error("matrix is not in the monoid: {0}")]
    NotInMonoid(String),

    #[error("entries too imprecise to decide: {0}")]
    TooImprecise(String),

    #[error("weight error: {0}")]
    Weight(String),

    #[error("non-dominant weight ({n1}, {n2}): the classical subspace is zero")]
    NonDominant { n1: i64, n2: i64 },

    #[error("newton polygon error: {0}")]
    Newton(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("hecke degree identity failed: {0}")]
    DegreeIdentity(String),

    #[error("invalid hecke operator: {0}")]
    InvalidOperator(String),

    #[error("certification failure: {0}")]
    Certification(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
