//! Quantum measurement chains with the apparatus inside the quantum
//! description.
//!
//! The crate evolves a system together with the pointer degrees of freedom of
//! its measurement instruments, computes probabilities of consecutive outcomes
//! with the Born rule, and deduces the state the first outcome prepares,
//! rather than postulating a collapse. Modules:
//!
//! * [`linalg`]: dense complex states, operators, projectors, density
//!   operators, tensor products and partial traces.
//! * [`instruments`]: the five instrument classes (ideal, degenerate ideal,
//!   non-ideal, generalized, macroscopic), their validation and the isometry
//!   each induces on system ⊗ pointer.
//! * [`chain`]: two consecutive measurements, their joint evolution,
//!   conditional probabilities, prepared states and comparison with the
//!   collapse rule.
//! * [`logic`]: the Boolean lattice of outcome propositions over a fixed
//!   basis, with projector representation and Kolmogorov axiom checks.
//!
//! The crate is `no_std` (with `alloc`); everything is immutable after
//! construction and all operations are pure, so values can be shared freely
//! across threads.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chain;
pub mod instruments;
pub mod linalg;
pub mod logic;

pub use chain::{predict_conditional, ChainResult, ChainScenario, CollapseDeviation};
pub use instruments::{Instrument, InstrumentClass, InstrumentSpec, ValidationReport};
pub use linalg::{
    born, is_isometry, partial_trace, trace_distance, DensityOperator, Matrix, Operator, Projector,
    StateVector,
};
pub use logic::{OutcomeBasis, Proposition};

/// Tolerance for structural invariants: hermiticity, idempotence,
/// normalization, orthonormality and completeness residuals.
pub const STRUCT_TOL: f64 = 1e-10;

/// Tolerance for the equality of probabilities computed along two
/// independent routes (joint Born quotient vs. trace over the prepared
/// state, analytic prepared state vs. partial-trace oracle).
pub const CROSS_TOL: f64 = 1e-9;

/// Smallest outcome probability that still defines conditioning; below it
/// conditional quantities are reported as undefined instead of 0/0.
pub const CONDITION_EPS: f64 = 1e-12;
