//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by solver and kernel operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two vectors that must share a length do not.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation received an empty vector.
    #[error("empty vector")]
    EmptyVector,

    /// A phi order above the supported maximum was requested.
    #[error("unsupported phi order {0} (supported: 0..=4)")]
    UnsupportedPhiOrder(usize),

    /// Scalar function values overflowed while building divided differences,
    /// i.e. `dt * (c + gamma * xi)` left the representable range.
    #[error("divided differences overflowed at node {node}: dt*(c + gamma*xi) out of range")]
    Overflow { node: usize },

    /// The Leja recurrence hit the node cap without meeting the tolerance.
    #[error(
        "Leja interpolation did not converge within {max_nodes} nodes \
         (residual {residual:.3e}); reduce dt or loosen the tolerance"
    )]
    NonConvergence { max_nodes: usize, residual: f64 },

    /// A non-finite intermediate appeared in the Leja recurrence, which
    /// signals that the operator spectrum is not enclosed by the
    /// shift/scale interval.
    #[error("Leja recurrence diverged at iteration {iteration}: spectrum not enclosed by [c - 2*gamma, c + 2*gamma]")]
    Divergence { iteration: usize },

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Stage fractions for vertical interpolation must be non-empty and
    /// strictly increasing.
    #[error("invalid integrator coefficients: {0}")]
    InvalidCoeffs(&'static str),

    /// `spectrum_to_leja` requires a nonnegative dominant magnitude.
    #[error("dominant eigenvalue magnitude must be nonnegative, got {0}")]
    NegativeMagnitude(f64),

    /// An interpolation config violated its invariants.
    #[error("invalid interpolation config: {0}")]
    InvalidConfig(&'static str),

    /// A name not present in the integrator registry was requested.
    #[error("unknown integrator {name:?}; valid choices: {valid}")]
    UnknownIntegrator { name: String, valid: String },

    /// A registered integrator whose order validation is still pending was
    /// requested without opting in.
    #[error("integrator {0:?} is registered but disabled by default; enable it explicitly")]
    DisabledIntegrator(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
