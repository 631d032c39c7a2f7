//! Exact integer linear algebra: Hermite normal form, rank, integer kernel
//! bases and integer-combination solving.

mod hnf;
mod lattice;
mod matrix;

pub use hnf::{hermite_normal_form, rank, HermiteForm};
pub use lattice::{is_integer_combination, kernel_lattice_basis, CombinationSolver, LatticeBasis, Move};
pub use matrix::IntMatrix;
