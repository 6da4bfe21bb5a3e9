use thiserror::Error;

/// Errors raised by the numerical routines. Payloads are stored as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("non-finite integrand value at node {node}")]
    NonFiniteIntegrand { node: f64 },
    #[error("truncation did not converge: tail contribution {tail:e} at radius {radius}")]
    TruncationNotConverged { radius: f64, tail: f64 },
    #[error("quadrature did not reach tolerance at node {node}: error estimate {error:e}")]
    QuadratureNotConverged { node: f64, error: f64 },
    #[error("gamma function pole at z = {re} + {im}i")]
    GammaPole { re: f64, im: f64 },
    #[error("hypergeometric series did not converge after {terms} terms")]
    SeriesNotConverged { terms: usize },
    #[error("log-derivative of the weight is singular at x = 0")]
    SingularAtZero,
    #[error("weight overflows at x = {x}")]
    Overflow { x: f64 },
    #[error("derivative unavailable: no callback supplied and finite differences are disabled")]
    DerivativeUnavailable,
    #[error("imaginary residue {residue:e} exceeds bound {bound:e} at {at}")]
    ImaginaryResidue { at: f64, residue: f64, bound: f64 },
    #[error("kernel mass {measured} deviates from expected {expected} at x = {x}")]
    MassMismatch { x: f64, measured: f64, expected: f64 },
    #[error("negative kernel density of mass {mass:e} clipped at x = {x}")]
    NegativeDensity { x: f64, mass: f64 },
    #[error("state {x} outside the transition table range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::InvalidConfig(_) => "invalid_config",
            Error::InvalidInput(_) => "invalid_input",
            Error::NonFiniteIntegrand { .. } => "non_finite_integrand",
            Error::TruncationNotConverged { .. } => "truncation_not_converged",
            Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
            Error::GammaPole { .. } => "gamma_pole",
            Error::SeriesNotConverged { .. } => "series_not_converged",
            Error::SingularAtZero => "singular_at_zero",
            Error::Overflow { .. } => "overflow",
            Error::DerivativeUnavailable => "derivative_unavailable",
            Error::ImaginaryResidue { .. } => "imaginary_residue",
            Error::MassMismatch { .. } => "mass_mismatch",
            Error::NegativeDensity { .. } => "negative_density",
            Error::OutOfRange { .. } => "out_of_range",
            Error::Mismatch(_) => "mismatch",
            Error::Io(_) => "io",
            Error::Format(_) => "format",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
