use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at {0}")]
    Pole(String),

    #[error("invalid shifts: {0}")]
    InvalidShift(String),

    #[error("arguments are not coprime: gcd({0}, {1}) = {2}")]
    NotCoprime(u64, u64, u64),

    #[error("{0} exceeds the prime sieve bound {1}")]
    SieveBound(u64, u64),

    #[error("euler factor vanishes at p = {0}")]
    ZeroFactor(u64),

    #[error("argument within {distance:e} of a pole of {which}")]
    PoleProximity { which: &'static str, distance: f64 },

    #[error("budget exceeded: {required} character evaluations requested, limit {limit}")]
    Budget { required: u64, limit: u64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
