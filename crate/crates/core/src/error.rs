use thiserror::Error;

/// Errors raised by the numerics, synthesis and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MracError {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("improper transfer function: numerator degree {num_degree} > denominator degree {den_degree}")]
    ImproperTransferFunction { num_degree: usize, den_degree: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular linear system ({0})")]
    SingularSystem(String),

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("unstable system: {0}")]
    Unstable(String),

    #[error("|theta| = {theta} exceeds theta_max = {theta_max}")]
    ProjectionViolation { theta: f64, theta_max: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("lambda_bar = {lambda_bar:e} is not positive; xi0 violates the Lyapunov margin")]
    NonPositiveLambdaBar { lambda_bar: f64 },

    #[error("delta = {delta} is outside (0, x_m_bar) with x_m_bar = {x_m_bar}")]
    DeltaOutOfRange { delta: f64, x_m_bar: f64 },

    #[error("ledger does not match scenario: {0}")]
    LedgerMismatch(String),
}

pub type Result<T> = std::result::Result<T, MracError>;
