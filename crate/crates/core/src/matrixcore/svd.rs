//! Singular values by one-sided (Hestenes) Jacobi. Used only to estimate the
//! conditioning of eigenvector matrices, where small singular values must be
//! resolved to full relative accuracy.

use super::matrix::CMatrix;
use super::rotation::Rotation;
use crate::scalar::{Real, C};

const MAX_SWEEPS: usize = 80;

pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let n = m.dim();
    let mut cols: Vec<Vec<C<T>>> = (0..n).map(|j| m.column(j).into_vec()).collect();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = cols[p].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let beta = cols[q].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let gamma = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .fold(C::new(T::zero(), T::zero()), |s, (a, b)| s + a.conj() * b);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                for k in 0..n {
                    let (xp, xq) = rot.right(cols[p][k], cols[q][k]);
                    cols[p][k] = xp;
                    cols[q][k] = xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter()
        .map(|col| {
            let v = super::matrix::CVector::from_vec(col.clone());
            v.norm()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn diagonal_singular_values() {
        let m = CMatrix::<f64>::from_diag(&[c(3.0, 0.0), c(0.0, -2.0), c(0.5, 0.0)]);
        let mut sv = singular_values(&m);
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sv[0] - 0.5).abs() < 1e-15);
        assert!((sv[1] - 2.0).abs() < 1e-15);
        assert!((sv[2] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn resolves_tiny_singular_value() {
        // columns (1, 0) and (1, 1e-12): σ_min ≈ 1e-12 / √2
        let m = CMatrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[0.0, 1e-12]]).unwrap();
        let sv = singular_values(&m);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let smax = sv.iter().copied().fold(0.0, f64::max);
        assert!((smin / (1e-12 / 2f64.sqrt()) - 1.0).abs() < 1e-6, "{smin}");
        assert!((smax - 2f64.sqrt()).abs() < 1e-12);
    }
}
