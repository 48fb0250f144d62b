//! Error types, one per module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("invalid group model: {0}")]
    InvalidModel(String),
    #[error("element {element} does not belong to model {model}")]
    ModelMismatch { model: String, element: String },
    #[error("enumeration of {bound} elements exceeds the cap of {cap}")]
    EnumerationTooLarge { bound: u128, cap: u64 },
    #[error("cannot parse {input:?} as an element of {model}")]
    ParseElement { model: String, input: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("the boundary of a degree-0 chain is undefined")]
    DegreeZeroBoundary,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("chains live over different models ({left} vs {right})")]
    ModelMismatch { left: String, right: String },
    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),
    #[error("cannot parse chain: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("exponents must satisfy p < q (got p = {p}, q = {q})")]
    ExponentOrder { p: String, q: String },
    #[error("homomorphism carries no kernel-control certificate")]
    MissingCertificate,
    #[error("chain contains a simplex of diameter 0, outside the range of the estimate")]
    DegenerateSupport,
    #[error("fiber of index {index} has {fiber_size} elements but beta = {beta}")]
    FiberControl { index: usize, fiber_size: usize, beta: u64 },
    #[error("generalized Hoelder bound needs non-negative values and weights")]
    SignedValues,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("homomorphism does not map generators into generators: {0}")]
    GeneratorImage(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffusionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("annulus of radius {radius} is empty (finite group smaller than r^N)")]
    EmptyAnnulus { radius: u64 },
    #[error("annulus radius {radius} overflows for degree {degree}")]
    RadiusOverflow { radius: u64, degree: u32 },
    #[error("diffusion degree must be at least 1")]
    InvalidDegree,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum F2Error {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("level {level}: word {word} produced twice")]
    CollisionDetected { level: usize, word: String },
    #[error("level {level} has not been built")]
    LevelNotBuilt { level: usize },
    #[error("telescoping identity fails at D = {level}")]
    TelescopingMismatch { level: usize },
    #[error("b({level}) has {found} distinct simplices, expected {expected}")]
    SupportMismatch { level: usize, found: usize, expected: usize },
    #[error("{levels} levels exceed the cap of {cap}")]
    CapExceeded { levels: usize, cap: usize },
}
