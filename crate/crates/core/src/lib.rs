//! Lie algebroids on affine bundles, in coordinates.
//!
//! An affine algebroid is stored as a vector Lie algebroid on the bidual
//! frame `{e0, e1, …, en}` whose index 0 is distinguished. On top of that
//! representation the crate provides:
//!
//! - [`algebroid`]: sections, brackets, anchor action and axiom validation;
//! - [`calculus`]: k-forms, wedge, contraction, exterior differential, Lie
//!   derivative and change of coframe;
//! - [`poisson`]: the linear Poisson structure on the extended dual;
//! - [`prolong`]: the prolongation over `E`, contact forms, vertical
//!   endomorphism, vertical and complete lifts;
//! - [`lagrangian`]: Cartan forms, Lagrangian pseudo-SODEs and the Legendre map;
//! - [`dynamics`]: fixed-step integration of pseudo-SODEs;
//! - [`random`]: seeded generators for fuzzing identities.
//!
//! All scalar data are [`symkernel::Expr`] values; identities are decided by
//! [`symkernel::ZeroTest`].

pub mod algebroid;
pub mod calculus;
pub mod dynamics;
pub mod fixtures;
pub mod lagrangian;
pub mod poisson;
pub mod prolong;
pub mod random;
pub mod symkernel;

pub use algebroid::{AffineAlgebroid, AlgebroidError, Section, ValidationReport, VectorAlgebroid};
pub use calculus::KForm;
pub use symkernel::{Chart, Expr, Role, ZeroTest, Zeroness};
