//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the range an operation supports.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A contour was cut before the integrand decayed; carries the relative
    /// magnitude of the integrand at the cut.
    #[error("contour truncation insufficient: residual {residual:.3e} ({context})")]
    TruncationInsufficient { residual: f64, context: String },

    /// Order doubling did not converge; carries the last two iterates.
    #[error("no convergence: last iterates {last:.17e}, {previous:.17e} ({context})")]
    NoConvergence {
        last: f64,
        previous: f64,
        context: String,
    },

    /// `Id - K` is singular to working precision.
    #[error("operator near-singular: condition estimate {cond_estimate:.3e}")]
    NearSingular { cond_estimate: f64 },

    /// A determinant that must be real came out with a large imaginary part.
    #[error("imaginary residue {residual:.3e} exceeds tolerance ({context})")]
    ImaginaryResidue { residual: f64, context: String },

    /// The ODE solution left the bounded branch; names the divergence point.
    #[error("solution blow-up detected at s = {at}")]
    BlowUp { at: f64 },

    /// I/O failure in the CLI layer.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
