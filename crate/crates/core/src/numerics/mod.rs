//! Dense complex linear algebra: the substrate for every other module.

mod eigen;
mod lu;
mod matrix;

pub use eigen::{
    expm_hermitian, hermitian_eig, hermitian_eigenvalues, hermitian_function, jacobi_eig, principal_arg, unitary_eig,
    EigenDecomposition, JACOBI_TOL, UNITARY_CLUSTER_GAP,
};
pub use lu::{inverse, relative_residual, solve, LinearSolution, Lu, SINGULAR_REL};
pub use matrix::{vec_dot, vec_norm, vec_scale, vec_sub, ComplexMatrix, HERMITIAN_TOL, UNITARY_TOL};

pub use num_complex::Complex64;

/// Shorthand for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
