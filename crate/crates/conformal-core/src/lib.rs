//! Exact engine for Lie conformal algebras and their module extensions.
//!
//! The crate is organized bottom-up:
//!
//! * [`field`] -- scalars: arbitrary-precision rationals and real quadratic
//!   extensions `Q(sqrt(d))`.
//! * [`poly`] -- sparse multivariate polynomials over those scalars, with the
//!   substitutions that drive lambda-bracket calculus.
//! * [`linalg`] -- exact linear algebra: reduced row echelon form and
//!   nullspaces over the scalar field, fraction-free elimination for matrices
//!   with one polynomial parameter, and modular rank checks.
//! * [`roots`] -- exact root extraction for univariate rational polynomials
//!   (rational and quadratic-irrational roots, certified by substitution).
//! * [`lca`] -- Lie conformal algebras presented by lambda-bracket tables,
//!   their axiom checker, and the construction of such tables from
//!   finite-dimensional Novikov algebras.
//! * [`modules`] -- conformal modules over those algebras: axiom checking,
//!   the classification of free rank-1 modules, and submodule witnesses.
//! * [`ext`] -- extensions between irreducible modules: cocycle systems,
//!   coboundaries, extension-space dimensions, and parameter sweeps that
//!   locate exceptional weights.
//! * [`annihilation`] -- the graded Lie algebras attached to a conformal
//!   algebra, their truncations, derived series, and filtration checks.

pub mod annihilation;
pub mod ext;
pub mod field;
pub mod lca;
pub mod linalg;
pub mod modules;
pub mod poly;
pub mod roots;

pub use field::{FieldElem, FieldError, Rat};
pub use poly::MultiPoly;
