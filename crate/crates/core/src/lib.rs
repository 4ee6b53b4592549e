//! Rotationally covariant transformations of spin states.
//!
//! The toolkit decides which spin states can be reached from a given state by
//! channels that commute with all SU(2) rotations. States are described by
//! their characteristic functions, written as polynomials in the group
//! variables `u, u*, v, v*`, and reachability questions become semidefinite
//! programs over the coefficients of those polynomials.
//!
//! Module map:
//!
//! - [`spin`]: half-integer bookkeeping, states, spin matrices, 3j symbols and
//!   the matrix-exponential rotation oracle.
//! - [`poly`]: sparse polynomial algebra in `u, u*, v, v*`, the polynomial
//!   representation of SU(2), characteristic functions and canonical reduction.
//! - [`majorana`]: stellar constellations of single-irrep states.
//! - [`u1`]: U(1) conversion criteria and the two-arm interferometer analysis.
//! - [`covariant`]: the SU(2)-covariant engines (feasibility, maximum
//!   probability, covariant channels, maximum fidelity).
//! - [`solver`]: the conic-program contract and its interior-point backend.

// Links the system OpenBLAS used by the solver's PSD cone.
use openblas_src as _;

pub mod covariant;
pub mod error;
pub mod majorana;
pub mod poly;
pub mod solver;
pub mod spin;
pub mod u1;

pub use error::{Error, Result};
pub use spin::{BlockDensity, HalfInt, SpinKet, SpinSpace, SphereVec};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Global absolute tolerance for floating comparisons.
pub const TOL: f64 = 1e-9;
