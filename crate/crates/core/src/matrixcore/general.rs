//! Eigendecomposition of general complex matrices: Householder reduction to
//! Hessenberg form, shifted QR iteration to the complex Schur form
//! `M = Z T Z^H`, then eigenvectors of `T` by back substitution.

use num_traits::Zero;

use super::eigen::EigenSystem;
use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

const ITERATIONS_PER_EIGENVALUE: usize = 60;
const EXCEPTIONAL_SHIFT_EVERY: usize = 10;

pub fn eig_general<T: Real>(m: &CMatrix<T>) -> Result<EigenSystem<T>> {
    m.check_finite()?;
    let n = m.dim();
    let (t, z) = schur(m)?;
    let pairs = (0..n)
        .map(|k| {
            let x = triangular_eigenvector(&t, k);
            (t[(k, k)], z.apply(&x))
        })
        .collect();
    Ok(EigenSystem::assemble(m, pairs, false))
}

/// Complex Schur decomposition; returns `(T, Z)` with `T` upper triangular.
pub(crate) fn schur<T: Real>(m: &CMatrix<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
    let n = m.dim();
    let (mut h, mut z) = hessenberg(m);
    if n == 1 {
        return Ok((h, z));
    }
    let eps = T::epsilon();
    let fro = h.norm_frobenius();
    let tiny = T::min_positive_value() / eps;
    let max_iter = ITERATIONS_PER_EIGENVALUE * n;

    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the top of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == T::zero() {
                scale = fro;
            }
            if sub <= eps * scale || sub <= tiny {
                h[(lo, lo - 1)] = C::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NoConvergence {
                iterations: max_iter,
            });
        }
        let shift = if its % EXCEPTIONAL_SHIFT_EVERY == 0 {
            let mut s = h[(hi, hi - 1)].norm();
            if hi >= 2 {
                s += h[(hi - 1, hi - 2)].norm();
            }
            h[(hi, hi)] + cr(s * T::lit(0.75))
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(&mut h, &mut z, lo, hi, shift);
    }
    // clear the strictly lower part left at roundoff level
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = C::zero();
        }
    }
    Ok((h, z))
}

fn hessenberg<T: Real>(m: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (a, q);
    }
    for k in 0..(n - 2) {
        let x: Vec<C<T>> = ((k + 1)..n).map(|i| a[(i, k)]).collect();
        let xnorm = CVector::from_vec(x.clone()).norm();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == T::zero() {
            cr(T::one())
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = CVector::from_vec(v.clone()).norm();
        if vnorm == T::zero() {
            continue;
        }
        for vi in &mut v {
            *vi = *vi / vnorm;
        }
        let two = T::lit(2.0);
        // A ← (I − 2vv^H) A
        for j in 0..n {
            let mut s: C<T> = C::zero();
            for (idx, vi) in v.iter().enumerate() {
                s += vi.conj() * a[(k + 1 + idx, j)];
            }
            let s = s * two;
            for (idx, vi) in v.iter().enumerate() {
                a[(k + 1 + idx, j)] -= *vi * s;
            }
        }
        // A ← A (I − 2vv^H), Q ← Q (I − 2vv^H)
        for mat in [&mut a, &mut q] {
            for i in 0..n {
                let mut s: C<T> = C::zero();
                for (idx, vi) in v.iter().enumerate() {
                    s += mat[(i, k + 1 + idx)] * *vi;
                }
                let s = s * two;
                for (idx, vi) in v.iter().enumerate() {
                    mat[(i, k + 1 + idx)] -= s * vi.conj();
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = C::zero();
        }
    }
    (a, q)
}

/// Eigenvalue of the trailing 2×2 block closest to its last diagonal entry.
fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Givens rotation `G = [[c, s], [-conj(s), c]]` with `G·(x, y)ᵀ = (r, 0)ᵀ`.
fn givens<T: Real>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), C::zero());
    }
    if ax == T::zero() {
        return (T::zero(), y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn qr_sweep<T: Real>(h: &mut CMatrix<T>, z: &mut CMatrix<T>, lo: usize, hi: usize, shift: C<T>) {
    let n = h.dim();
    for k in lo..hi {
        let (x, y) = if k == lo {
            (h[(lo, lo)] - shift, h[(lo + 1, lo)])
        } else {
            (h[(k, k - 1)], h[(k + 1, k - 1)])
        };
        let (c, s) = givens(x, y);
        let first_col = if k == lo { k } else { k - 1 };
        for j in first_col..n {
            let (p, q) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = p * c + s * q;
            h[(k + 1, j)] = q * c - s.conj() * p;
        }
        let last_row = (k + 2).min(hi);
        for i in 0..=last_row {
            let (p, q) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = p * c + q * s.conj();
            h[(i, k + 1)] = q * c - p * s;
        }
        for i in 0..n {
            let (p, q) = (z[(i, k)], z[(i, k + 1)]);
            z[(i, k)] = p * c + q * s.conj();
            z[(i, k + 1)] = q * c - p * s;
        }
        if k > lo {
            h[(k + 1, k - 1)] = C::zero();
        }
    }
}

/// Solves `(T − T_kk) x = 0` with `x_k = 1` and `x_j = 0` for `j > k`.
fn triangular_eigenvector<T: Real>(t: &CMatrix<T>, k: usize) -> CVector<T> {
    let n = t.dim();
    let lambda = t[(k, k)];
    let smin = (T::epsilon() * t.norm_frobenius()).max(T::min_positive_value());
    let big = T::lit(1e100).min(T::max_value().sqrt());
    let mut x = vec![C::<T>::zero(); n];
    x[k] = cr(T::one());
    for j in (0..k).rev() {
        let mut s: C<T> = C::zero();
        for m in (j + 1)..=k {
            s += t[(j, m)] * x[m];
        }
        let mut d = t[(j, j)] - lambda;
        if d.norm() < smin {
            d = cr(smin);
        }
        x[j] = -s / d;
        if x[j].norm() > big {
            let inv = big.recip();
            for xi in x.iter_mut() {
                *xi = *xi * inv;
            }
        }
    }
    CVector::from_vec(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn pt_dimer_below_exceptional_point() {
        let m = CMatrix::<f64>::from_rows(&[
            vec![c(0.0, 0.5), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, -0.5)],
        ])
        .unwrap();
        let es = eig_general(&m).unwrap();
        let e = 0.75f64.sqrt();
        assert!((es.eigenvalues[0] - c(-e, 0.0)).norm() < 1e-14);
        assert!((es.eigenvalues[1] - c(e, 0.0)).norm() < 1e-14);
        assert!(es.residual_max < 1e-9 * m.norm_max());
        assert!(!es.near_defective());
    }

    #[test]
    fn pt_dimer_at_exceptional_point_is_flagged() {
        let m = CMatrix::<f64>::from_rows(&[
            vec![c(0.0, 1.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        let es = eig_general(&m).unwrap();
        for e in &es.eigenvalues {
            assert!(e.norm() < 1e-7, "{e}");
        }
        assert!(es.near_defective(), "cond {}", es.vec_condition);
    }

    #[test]
    fn diagonal_imaginary() {
        let m = CMatrix::<f64>::from_diag(&[c(0.0, 2.0), c(0.0, -2.0)]);
        let es = eig_general(&m).unwrap();
        assert_eq!(es.eigenvalues, vec![c(0.0, -2.0), c(0.0, 2.0)]);
        assert_eq!(es.vectors[0], CVector::basis(2, 1));
        assert_eq!(es.vectors[1], CVector::basis(2, 0));
    }

    #[test]
    fn schur_is_unitary_similarity() {
        let m = CMatrix::<f64>::from_fn(7, |i, j| {
            c(
                ((3 * i + 5 * j) % 7) as f64 - 3.0,
                ((i * j) % 4) as f64 * 0.5,
            )
        });
        let (t, z) = schur(&m).unwrap();
        let back = z.matmul(&t).matmul(&z.adjoint());
        assert!((&back - &m).norm_max() < 1e-12);
        let zz = z.adjoint().matmul(&z);
        assert!((&zz - &CMatrix::identity(7)).norm_max() < 1e-13);
        for i in 1..7 {
            for j in 0..i {
                assert_eq!(t[(i, j)], C::zero());
            }
        }
    }

    #[test]
    fn random_matrix_residuals() {
        let m = CMatrix::<f64>::from_fn(10, |i, j| {
            let a = ((i * 31 + j * 17) % 13) as f64 / 13.0 - 0.5;
            let b = ((i * 7 + j * 29) % 11) as f64 / 11.0 - 0.5;
            c(a, b)
        });
        let es = eig_general(&m).unwrap();
        assert!(es.residual_max < 1e-12, "{}", es.residual_max);
        let sum: C<f64> = es.eigenvalues.iter().sum();
        assert!((sum - m.trace()).norm() < 1e-12);
    }
}
