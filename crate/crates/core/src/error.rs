use thiserror::Error;

/// Every failure the toolkit reports. Variants mirror the precondition and
/// precision failures of the individual operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("valuation is indeterminate: no certified digit")]
    IndeterminateValuation,
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Hensel lifting stalled: {0}")]
    LiftingStall(String),
    #[error("adapted norm did not stabilize: {0}")]
    WindowNotStabilized(String),
    #[error("inconsistent spectral split: {0}")]
    InconsistentSplit(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("point lies outside the radius of convergence")]
    OutsideRadius,
    #[error("composition radius violated: {0}")]
    RadiusViolation(String),
    #[error("domination condition violated: {0}")]
    DominationViolated(String),
    #[error("block inequality failed: {0}")]
    ModeInequalityFailed(String),
    #[error("no valid radius: {0}")]
    NoValidRadius(String),
    #[error("coefficient bound violated: {0}")]
    BoundViolated(String),
    #[error("contraction certificate failed: {0}")]
    ContractionCertificateFailed(String),
}

/// Coarse grouping used for process exit codes and report status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// A mathematical hypothesis of the requested operation does not hold.
    Precondition,
    /// The working precision is too small to certify the answer.
    Precision,
    /// Malformed input.
    Input,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidField(_) | Parse(_) | DimensionMismatch(_) | InvalidArgument(_) => ErrorClass::Input,
            IndeterminateValuation
            | PrecisionExhausted(_)
            | LiftingStall(_)
            | WindowNotStabilized(_)
            | InconsistentSplit(_) => ErrorClass::Precision,
            DivisionByZero
            | NotInvertible(_)
            | OutsideRadius
            | RadiusViolation(_)
            | DominationViolated(_)
            | ModeInequalityFailed(_)
            | NoValidRadius(_)
            | BoundViolated(_)
            | ContractionCertificateFailed(_) => ErrorClass::Precondition,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidField(_) => "InvalidField",
            IndeterminateValuation => "IndeterminateValuation",
            DivisionByZero => "DivisionByZero",
            PrecisionExhausted(_) => "PrecisionExhausted",
            Parse(_) => "Parse",
            DimensionMismatch(_) => "DimensionMismatch",
            InvalidArgument(_) => "InvalidArgument",
            LiftingStall(_) => "LiftingStall",
            WindowNotStabilized(_) => "WindowNotStabilized",
            InconsistentSplit(_) => "InconsistentSplit",
            NotInvertible(_) => "NotInvertible",
            OutsideRadius => "OutsideRadius",
            RadiusViolation(_) => "RadiusViolation",
            DominationViolated(_) => "DominationViolated",
            ModeInequalityFailed(_) => "ModeInequalityFailed",
            NoValidRadius(_) => "NoValidRadius",
            BoundViolated(_) => "BoundViolated",
            ContractionCertificateFailed(_) => "ContractionCertificateFailed",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
