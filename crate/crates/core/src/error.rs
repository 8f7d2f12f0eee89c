use thiserror::Error;

/// Errors raised by the group algebra, the simulator and the solver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported range (p < 2^31)")]
    PrimeTooLarge(u64),
    #[error("non-invertible: {0} has no inverse mod {1}")]
    NonInvertible(u32, u32),
    #[error("odd prime required")]
    OddPrimeRequired,
    #[error("degenerate equation")]
    DegenerateEquation,
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("phi undefined for this group")]
    PhiUndefined,
    #[error("closure too large: more than {0} elements")]
    ClosureTooLarge(usize),
    #[error("dimension budget exceeded: {needed} > {budget}")]
    DimensionBudget { needed: u128, budget: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty subset")]
    EmptySubset,
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("basis state leaves the register frame")]
    OutsideFrame,
    #[error("zero amplitude state")]
    ZeroAmplitudeState,
    #[error("large-prime path only (p >= 11 required, got {0})")]
    LargePrimePathOnly(u32),
    #[error("resample cap of {0} iterations exceeded")]
    ResampleCap(usize),
    #[error("retry cap of {0} attempts exceeded")]
    RetryCap(usize),
    #[error("sampling did not stabilize after {0} samples")]
    SamplingDidNotStabilize(usize),
    #[error("hidden subgroup contains the center; use the quotient branch")]
    CenterInSubgroup,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
