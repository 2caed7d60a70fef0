//! Exact Cartan prolongation of graded nilpotent Lie (super)algebras
//! realized by polynomial vector fields.

pub mod algspec;
pub mod centralize;
pub mod prolong;
pub mod realize;
pub mod scalar;
pub mod superpoly;
pub mod vecfield;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use scalar::{Field, LinearSystem, RowSpace, Scalar, ScalarError, SolvePolicy, SparseVec};

