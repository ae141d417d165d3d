//! Dense complex linear algebra: matrices, tensor structure, partial traces,
//! the Hermitian eigensolver and trace-norm distances.

mod density;
mod eig;
mod matrix;
mod shape;

pub(crate) use density::{check_distribution, trace_distance_mat};
pub use density::{distribution_distance, trace_distance, DensityMatrix};
pub use eig::{
    hermitian_eig, hermitian_eigvals, hermitian_eigvals_tridiagonal, HermitianEigen, MAX_SWEEPS,
    OFF_DIAGONAL_TOL,
};
pub use matrix::{gates, CMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use shape::{apply_kraus_on, apply_left, conjugate_on, embed, partial_trace, SpaceShape};

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> crate::Result<CMatrix> {
    a.kron(b)
}
