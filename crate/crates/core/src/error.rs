use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p must be prime (got {0})")]
    NotPrime(u64),
    #[error("exponent s must be at least 1")]
    ZeroExponent,
    #[error("modulus {0} does not fit the supported integer range")]
    ModulusTooLarge(String),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("operands live over different moduli")]
    ModulusMismatch,
    #[error("divisor is not monic")]
    NonMonicDivisor,
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial has no root in the target field")]
    NoRoot,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("polynomial is not irreducible modulo p")]
    NotIrreducible,
    #[error("starting point is not a root modulo p")]
    NotARootModP,
    #[error("root is not simple: derivative is not a unit")]
    NotASimpleRoot,
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("element does not belong to this context")]
    CtxMismatch,
    #[error("beta must satisfy 1 <= beta < p^s/2 (got {beta}, p^s = {modulus})")]
    BetaOutOfRange { beta: i128, modulus: i128 },
    #[error("reduction needs beta < p/2 (got beta = {beta}, p = {p})")]
    BetaTooLarge { beta: i128, p: u64 },
    #[error("LLL parameter delta must lie strictly between 1/4 and 1")]
    BadDelta,
    #[error("moduli are not pairwise coprime")]
    ModuliNotCoprime,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    InvariantBreach(String),
}

pub type Result<T> = std::result::Result<T, Error>;
