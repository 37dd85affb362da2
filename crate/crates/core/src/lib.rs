//! Finite-truncation toolkit for non-Hermitian Hamiltonians with real spectra.
//!
//! Operators are dense complex matrices in a coefficient basis. Scalar
//! products are diagonal in that basis with positive weights, so every
//! adjoint, Hermiticity defect and commutator can be evaluated exactly at
//! finite size. The model modules build on this engine:
//!
//! - [`hilbert`]: weighted bases, adjoints, rescalings, spectra.
//! - [`path`]: scalar products along complex paths on a uniform grid.
//! - [`coulomb`]: the rotated half-axis Coulomb problem.
//! - [`cannata`]: coefficient-space algebra of the `e^{2ix}` model.
//! - [`hatano_nelson`]: asymmetric-hopping lattice and biorthogonal systems.
//! - [`pt`]: antilinear parity-time operators and spectrum pairing.
//! - [`report`]: scenario configuration, suites and machine-readable reports.

pub mod cannata;
pub mod coulomb;
pub mod error;
pub mod hatano_nelson;
pub mod hilbert;
pub mod linalg;
pub mod path;
pub mod pt;
pub mod quad;
pub mod report;
pub mod special;

pub use error::{Error, Result};
pub use hilbert::{BasisTag, OperatorRep, WeightedBasisSpace};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;

/// Shorthand for `C64::new(re, im)`.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };
