//! Exact computations with the spatial diagrams of finite-dimensional
//! C*-algebras: commutative subalgebras and their spectra, colimits of
//! abelian-group diagrams, the diagrammatic extension of K-theory, and
//! partial ideals.

pub mod abelian;
pub mod algebra;
pub mod diagram;
pub mod error;
pub mod gen;
pub mod ideals;
pub mod io;
pub mod ktheory;
pub mod lattice;
pub mod matrix;
pub mod par;
pub mod scalar;
pub mod subalgebra;

pub use error::{Error, Result};
