//! Computational toolkit for nonlinear electrodynamics of photon-like field
//! configurations: exterior calculus on flat space-time, Maxwell stress
//! analysis, Frobenius curvature and nonlinear connections, strain tensors,
//! an explicit builder for spatially finite helical solutions, and a
//! numerical check of the two-charge interaction energy.
//!
//! All kernels are pure and deterministic; every identity the crate relies
//! on is exercised by the test suite, with the end-to-end checks collected
//! in the `acceptance` integration test.

// Index loops over fixed-size tensor slots and NaN-rejecting comparisons
// are the house style here; the derivation rules inside the operator
// overloads are the product rule, not arithmetic slips.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::suspicious_arithmetic_impl)]
#![allow(clippy::manual_is_multiple_of)]
#![allow(clippy::vec_init_then_push)]

pub mod coulomb;
pub mod eed;
pub mod error;
pub mod fields;
pub mod frobenius;
pub mod geometry;
pub mod linalg;
pub mod phlo;
pub mod strain;
pub mod stress;
pub mod tol;

pub use error::{Error, Result};
pub use fields::{
    fd_partial, integrate3, Axis, AxisSpec, Box3, Event, GridSpec, QuadratureSpec, Region, Rule,
    ScalarField, VectorField,
};
pub use geometry::{
    ext_d, hodge, hodge2, interior, lie_bracket, lie_derivative_form, lower, raise, wedge,
    FormValue, KForm, Mat4, Vec4,
};
pub use phlo::{PhLOSolution, PhaseFamily, SolutionSpec};
pub use stress::{EnergyTensor4, FieldInvariants, StressTensor3};
