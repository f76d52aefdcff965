//! Finitely presented abelian groups, their homomorphisms, and colimits of
//! diagrams of them.

mod colimit;
mod group;
mod hom;
mod snf;
mod word;

pub use colimit::{colimit, colimit_induced, AbDiagram, AbMorphism, Colimit};
pub use group::{element_eq, invariant_factors, InvariantFactors, Normalizer, PresentedAbGroup};
pub use hom::{cokernel, kernel, AbHom};
pub(crate) use snf::{parse_int, parse_int_rows};
pub use snf::{snf, solve_left, IntMatrix, SnfResult};
pub use word::Word;
