use serde::Serialize;

use super::matrix::{CMatrix, CVector};
use super::svd::singular_values;
use crate::scalar::{cmp_real, Real, C};

/// Eigenvector-matrix condition number above which a decomposition is
/// treated as near-defective (close to an exceptional point).
pub const NEAR_DEFECTIVE_CONDITION: f64 = 1e8;

/// Eigenvalues, unit right eigenvectors and conditioning diagnostics.
///
/// Eigenvalues are sorted by ascending real part, ties broken by ascending
/// imaginary part; `vectors[j]` belongs to `eigenvalues[j]`.
#[derive(Clone, Debug)]
pub struct EigenSystem<T: Real> {
    pub eigenvalues: Vec<C<T>>,
    pub vectors: Vec<CVector<T>>,
    /// `max_j ‖M v_j − E_j v_j‖₂`
    pub residual_max: T,
    /// 2-norm condition number of the eigenvector matrix.
    pub vec_condition: T,
}

impl<T: Real> EigenSystem<T> {
    /// Sorts, normalises and phase-fixes raw eigenpairs and fills in the
    /// residual and conditioning diagnostics against `m`. With `unitary` set
    /// the vectors come from a unitary similarity and the condition number
    /// is taken as one.
    pub(crate) fn assemble(m: &CMatrix<T>, pairs: Vec<(C<T>, CVector<T>)>, unitary: bool) -> Self {
        let mut pairs: Vec<(C<T>, CVector<T>)> = pairs
            .into_iter()
            .map(|(e, v)| {
                let mut v = v.normalized().unwrap_or(v);
                v.fix_phase();
                (e, v)
            })
            .collect();
        pairs.sort_by(|a, b| cmp_real(a.0.re, b.0.re).then(cmp_real(a.0.im, b.0.im)));

        let residual_max = pairs.iter().fold(T::zero(), |acc, (e, v)| {
            let r = m.apply(v).sub(&v.scale(*e)).norm();
            acc.max(r)
        });
        let (eigenvalues, vectors): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let vec_condition = if unitary {
            T::one()
        } else {
            let vmat = CMatrix::from_fn(m.dim(), |i, j| vectors[j][i]);
            let sv = singular_values(&vmat);
            let smax = sv.iter().copied().fold(T::zero(), T::max);
            let smin = sv.iter().copied().fold(T::infinity(), T::min);
            if smin > T::zero() {
                smax / smin
            } else {
                T::infinity()
            }
        };
        Self {
            eigenvalues,
            vectors,
            residual_max,
            vec_condition,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// True when the eigenvector matrix is too ill-conditioned to invert.
    pub fn near_defective(&self) -> bool {
        !(self.vec_condition <= T::lit(NEAR_DEFECTIVE_CONDITION))
    }

    pub fn max_abs_imag(&self) -> T {
        self.eigenvalues
            .iter()
            .fold(T::zero(), |m, e| m.max(e.im.abs()))
    }

    /// Real parts (for Hermitian decompositions these are the eigenvalues).
    pub fn real_values(&self) -> Vec<T> {
        self.eigenvalues.iter().map(|e| e.re).collect()
    }

    /// Eigenvectors as the columns of a matrix.
    pub fn vector_matrix(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.dim(), |i, j| self.vectors[j][i])
    }
}

/// Plain-number view of an eigenvalue, used for serialization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenvaluePoint {
    pub re: f64,
    pub im: f64,
}
