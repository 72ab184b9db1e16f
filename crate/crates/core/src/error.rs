use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scalars from different unramified contexts cannot be combined")]
    ContextMismatch,
    #[error("element is not a unit at the available precision")]
    NonUnit,
    #[error("value is indistinguishable from zero at the available precision")]
    ZeroAtPrecision,
    #[error("precision exhausted: {0}")]
    PrecisionLoss(String),
    #[error("p^N = {p}^{n} does not fit the 62-bit residue representation")]
    PrecisionTooLarge { p: u64, n: u32 },
    #[error("invalid context parameters: {0}")]
    InvalidContext(String),
    #[error("series is not a Frobenius polynomial: {0}")]
    NotFrobeniusPoly(String),
    #[error("height test inconclusive below degree {0}")]
    Inconclusive(u32),
    #[error("expected {expected} torsion points, got {got}")]
    WrongCardinality { expected: usize, got: usize },
    #[error("matrix is not in the Iwahori-type subgroup P: {0}")]
    NotInP(String),
    #[error("degree bound {dmax} exceeded (needed {needed})")]
    DegreeOverflow { needed: u64, dmax: u32 },
    #[error("group-ring expansion would produce {0} terms")]
    ExpansionTooLarge(usize),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
