//! Centralized tolerance constants for the verification suites.
//!
//! Two regimes cover everything in this crate: identities evaluated through
//! analytic derivatives, where only floating-point rounding accumulates, and
//! identities evaluated through second-order central differences, where the
//! truncation error scales with the square of the step.

/// Algebraic identities with analytic derivatives: pure rounding,
/// a few orders above f64 epsilon to absorb accumulation.
pub const ANALYTIC_IDENTITY: f64 = 1e-10;

/// Exact structural facts (symmetry by construction, trig cancellations).
pub const STRUCTURAL: f64 = 1e-14;

/// Machine-level checks with a little slack for contractions.
pub const CONTRACTION: f64 = 1e-12;

/// Scale factor for finite-difference-backed identities: the residual bound
/// is `FD_FACTOR * h^2 * scale`, with `scale` a third-derivative magnitude
/// of the fields involved. Calibrated on the smooth test battery.
pub const FD_FACTOR: f64 = 10.0;

/// Dual-pipeline comparisons, where both sides run through independent
/// analytic evaluation paths of moderate depth.
pub const DUAL_PIPELINE: f64 = 1e-8;

/// Relative tolerance for quadrature cross-checks at the default resolution.
pub const QUADRATURE_REL: f64 = 5e-3;
