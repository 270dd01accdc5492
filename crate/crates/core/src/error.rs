use thiserror::Error;

use crate::fields::Event;

/// Errors shared by all numerical kernels in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A field evaluator produced a non-finite value where a finite one was
    /// required (derivative stencils, quadrature nodes, tensor assembly).
    #[error("non-finite evaluation at {point:?} during {context}")]
    NonFinite { context: &'static str, point: Event },

    /// Exterior-algebra degree out of range for the requested operation.
    #[error("form degree {degree} invalid for {context}")]
    BadDegree { context: &'static str, degree: usize },

    /// Quadrature over an unbounded region without a compact-support hint.
    #[error("integration region is unbounded and the integrand carries no support box")]
    UnboundedRegion,

    /// Malformed grid or quadrature resolution.
    #[error("invalid resolution: {0}")]
    BadResolution(String),

    /// A configuration value violates its documented invariant.
    #[error("invalid configuration: {0}")]
    BadConfig(String),

    /// Boost velocity at or above the speed of light.
    #[error("boost speed {speed} is not below c = {c}")]
    Superluminal { speed: f64, c: f64 },

    /// Caller-supplied dual bases do not satisfy the duality pairing.
    #[error("duality precondition violated: {0}")]
    DualityMismatch(String),

    /// Evaluation point lies inside an excluded ball around a charge.
    #[error("point {point:?} lies inside an excluded charge ball")]
    InsideBall { point: [f64; 3] },

    /// The longitudinal rate vanishes, so no length scale is defined
    /// (running-wave configuration).
    #[error("length scale undefined: longitudinal rates vanish at {point:?}")]
    UndefinedScale { point: Event },

    /// Zero amplitude, so the phase (and phase rate) is undefined.
    #[error("amplitude vanishes at {point:?}; phase undefined")]
    SingularAmplitude { point: Event },
}

pub type Result<T> = std::result::Result<T, Error>;
