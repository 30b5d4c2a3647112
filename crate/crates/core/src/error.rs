use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("series is not a unit (constant term vanishes)")]
    NotAUnit,
    #[error("variable count mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("substituted series must vanish at the origin (component {component})")]
    OriginNotFixed { component: usize },
    #[error("derivative order {requested} exceeds series order {order}")]
    DerivativeTooDeep { requested: u32, order: u32 },
    #[error("linear part is singular: {0}")]
    Singular(String),
    #[error("requested order {requested} exceeds available order {available}")]
    OrderExceeded { requested: u32, available: u32 },
    #[error("not a manifold ideal: differentials at 0 have rank {rank}, expected {expected}")]
    NotAManifold { rank: usize, expected: usize },
    #[error("not generic: holomorphic differentials at 0 have rank {rank}, expected {expected}")]
    NotGeneric { rank: usize, expected: usize },
    #[error("not real: conjugate of generator {generator} leaves the ideal at degree {degree}")]
    NotReal { generator: usize, degree: u32 },
    #[error("defining functions do not vanish at the origin (component {component})")]
    NotAtOrigin { component: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type CrResult<T> = Result<T, CrError>;
