//! Exact computation with alternating multilinear forms over finite fields
//! and the hyperplanes they cut out of Grassmannians.

pub mod census;
pub mod counting;
pub mod delta;
pub mod exterior;
pub mod field;
pub mod geometry;
pub mod hyperplane;
pub mod matrix;
pub mod unipoly;

pub use exterior::{AlternatingFunctional, KSubset, MultiVector};
pub use field::{Field, FieldError, Scalar};
pub use geometry::{QuotientFrame, Subspace};
pub use hyperplane::{Hyperplane, HyperplaneError, TypeLabel, TypeSignature};
pub use matrix::{Gf2Matrix, Matrix};
pub use unipoly::UniPoly;
