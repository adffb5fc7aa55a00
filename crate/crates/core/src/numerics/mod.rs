//! Dense numerical substrate.

pub mod eig;
pub mod matrix;
pub mod quadrature;
pub mod subspace;

pub use eig::{sym_eigendecompose, SymEig};
pub use matrix::{dot, norm2, Matrix};
pub use quadrature::{gauss_legendre, simpson, simpson_integrate, FilonWeights, QuadratureGrid};
pub use subspace::{containment_angle, largest_angle, orthonormal_basis, principal_angles, Subspace, DEFAULT_RANK_TOL};
