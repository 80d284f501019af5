//! Dense complex linear algebra: matrices, eigendecompositions, the matrix
//! exponential and normalised non-unitary propagation.

mod eigen;
mod expm;
mod general;
mod hermitian;
mod matrix;
mod propagate;
mod rotation;
mod svd;

pub use eigen::{EigenSystem, EigenvaluePoint, NEAR_DEFECTIVE_CONDITION};
pub use expm::expm;
pub use general::eig_general;
pub use hermitian::{eig_hermitian, eig_hermitian_with_tolerance, HERMITIAN_TOL};
pub use matrix::{CMatrix, CVector};
pub use propagate::{
    propagate_normalized, short_step_apply, substeps_for, StepPropagator, MAX_STEP_NORM,
};
pub use svd::singular_values;
