//! Locally conformally symplectic geometry on flat tori.
//!
//! * [`exterior`]: spectral exterior calculus for forms on `T^n`.
//! * [`lichnerowicz`]: the twisted differential `d_theta`, its adjoint and
//!   Laplacian, Lee-form extraction, conformal gauge and the per-mode Hodge
//!   solver.
//! * [`moser`]: Moser isotopies for families of lcs forms, with numerical
//!   verification of conformal equivalence.
//! * [`twisted`]: exact Lichnerowicz cohomology of simplicial complexes with
//!   rank-one local systems, and mapping-torus models.
//!
//! The analytic modules are generic over [`Real`] (`f32`, `f64`); the
//! combinatorial module is exact over the rationals.

pub mod error;
pub mod exterior;
pub mod field;
pub mod form;
pub mod grid;
pub mod lichnerowicz;
pub mod linalg;
pub mod literal;
pub mod moser;
pub mod random;
pub mod scalar;
pub mod spectral;
pub mod twisted;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use form::{DiffForm, VectorField};
pub use grid::GridSpec;
pub use scalar::Real;

/// Double-precision scalar field.
pub type Field = ScalarField<f64>;
/// Double-precision differential form.
pub type Form = DiffForm<f64>;
/// Double-precision vector field.
pub type Vector = VectorField<f64>;
/// Single-precision differential form.
pub type Form32 = DiffForm<f32>;
