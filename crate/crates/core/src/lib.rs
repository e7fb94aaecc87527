//! Three-valued truth valuation of quantum propositions on finite-dimensional
//! Hilbert spaces.
//!
//! A proposition is a rank-1 projector `M = |x><x|`. A state is true when it
//! lies in the range of `M`, false when it lies in the kernel, and undecided
//! (a truth-value gap) otherwise. Range membership is decided by a pairwise
//! cross-product test and kernel membership by Gaussian elimination on the
//! augmented system, both with exact operation counting so the two paths can
//! be compared under serial, classical-parallel and quantum-parallel cost
//! models.

pub mod costmodel;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod membership;
pub mod numerics;
pub mod valuation;

pub use error::{Error, Result};
pub use linalg::{Matrix, Projector, StateVector};
pub use numerics::{OpCounter, Tolerance, C64};
pub use valuation::{valuate, Truth};
