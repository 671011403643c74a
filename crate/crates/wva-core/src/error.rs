use thiserror::Error;

/// Failure modes shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WvaError {
    /// Pre- and post-selection are orthogonal, so the weak value diverges.
    #[error("pre- and post-selection overlap {overlap:.3e} is below {limit:.0e}; weak value undefined")]
    OrthogonalSelection { overlap: f64, limit: f64 },

    /// No post-selection state produces the requested weak value.
    #[error("no post-selection realizes weak value {target}; inversion is singular")]
    UnreachableWeakValue { target: String },

    /// A state collapsed to (numerically) zero norm and cannot be normalized.
    #[error("output state norm {norm:.3e} too small to normalize")]
    DegenerateOutput { norm: f64 },

    /// A scheme-specific parameter was not supplied.
    #[error("missing parameter `{name}` required for {context}")]
    MissingParameter { name: &'static str, context: &'static str },

    /// A channel pushed a Bloch vector outside the unit ball.
    #[error("channel output |n| = {norm} exceeds the unit ball")]
    UnphysicalOutput { norm: f64 },

    /// Inputs fall outside the validity region of a series approximation.
    #[error("{quantity} = {value:.3e} outside approximation domain (|{quantity}| <= {limit})")]
    ApproximationDomain { quantity: &'static str, value: f64, limit: f64 },

    /// The phase to estimate exceeds what the modulator can null.
    #[error("|theta| = {theta:.3e} rad exceeds compensable range {range:.3e} rad")]
    NotCompensable { theta: f64, range: f64 },

    /// Fisher information is zero (or negative), so no bound exists.
    #[error("Fisher information {fisher:.3e} carries no phase information")]
    ZeroInformation { fisher: f64 },

    /// A ratio was requested with a zero denominator.
    #[error("division by zero in {context}")]
    DivideByZero { context: &'static str },

    /// A constructor argument violates a documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, WvaError>;
