use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_diag(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_row_major(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let m = Self { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<C<T>>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(dim, data)
    }

    /// Real matrix from rows of reals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C::new(T::lit(x), T::zero())).collect())
            .collect();
        Self::from_rows(&rows)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> CVector<T> {
        CVector::from_vec((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self
            .data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            Ok(())
        } else {
            Err(Error::NonFinite { what: "matrix" })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.check_finite().is_ok()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self + s·I`
    pub fn shift(&self, s: C<T>) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] += s;
        }
        m
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.dim)
            .map(|j| (0..self.dim).fold(T::zero(), |s, i| s + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn norm_frobenius(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    }

    /// `max |M - M^H|`
    pub fn hermitian_deviation(&self) -> T {
        let mut dev = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &CVector<T>) -> CVector<T> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        let n = self.dim;
        CVector::from_vec(
            (0..n)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.as_slice())
                        .fold(C::zero(), |s, (&a, &b)| s + a * b)
                })
                .collect(),
        )
    }

    /// `⟨v|M|v⟩` with `v` used as given (no normalization).
    pub fn expectation(&self, v: &CVector<T>) -> C<T> {
        v.dot(&self.apply(v))
    }

    /// `A B + B A`
    pub fn anticommutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) + &rhs.matmul(self)
    }

    /// Rank-one projector `|v⟩⟨v|`.
    pub fn outer(v: &CVector<T>) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    /// Solves `self · X = rhs` by LU factorisation with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for k in 0..n {
            let (piv, pmax) =
                (k..n)
                    .map(|i| (i, a[(i, k)].norm()))
                    .fold(
                        (k, T::zero()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pmax == T::zero() || !pmax.is_finite() {
                return Err(Error::NonFinite {
                    what: "singular linear system",
                });
            }
            if piv != k {
                for j in 0..n {
                    a.data.swap(k * n + j, piv * n + j);
                    b.data.swap(k * n + j, piv * n + j);
                }
            }
            let inv = a[(k, k)].inv();
            for i in (k + 1)..n {
                let f = a[(i, k)] * inv;
                if f.is_zero() {
                    continue;
                }
                a[(i, k)] = C::zero();
                for j in (k + 1)..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= f * akj;
                }
                for j in 0..n {
                    let bkj = b[(k, j)];
                    b[(i, j)] -= f * bkj;
                }
            }
        }
        for k in (0..n).rev() {
            let inv = a[(k, k)].inv();
            for j in 0..n {
                let mut s = b[(k, j)];
                for m in (k + 1)..n {
                    s -= a[(k, m)] * b[(m, j)];
                }
                b[(k, j)] = s * inv;
            }
        }
        Ok(b)
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

/// Complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector<T: Real> {
    data: Vec<C<T>>,
}

impl<T: Real> CVector<T> {
    pub fn from_vec(data: Vec<C<T>>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![C::zero(); dim],
        }
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = C::one();
        v
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm(&self) -> T {
        // scaled to survive very large or very small amplitudes
        let scale = self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if scale == T::zero() || !scale.is_finite() {
            return scale;
        }
        let inv = scale.recip();
        scale
            * self
                .data
                .iter()
                .fold(T::zero(), |s, z| s + (z * inv).norm_sqr())
                .sqrt()
    }

    /// Returns the unit vector, or `ZeroNorm` if the norm vanished or is not finite.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() || !n.is_finite() || n < T::min_positive_value() {
            return Err(Error::ZeroNorm);
        }
        let inv = n.recip();
        Ok(Self {
            data: self.data.iter().map(|z| z * inv).collect(),
        })
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn dot(&self, other: &Self) -> C<T> {
        assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(C::zero(), |s, (a, b)| s + a.conj() * b)
    }

    /// `|⟨self|other⟩|²` for unit vectors.
    pub fn fidelity(&self, other: &Self) -> T {
        self.dot(other).norm_sqr()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Multiplies by a unit phase so that the largest-modulus component is
    /// real and positive. The first index wins on exact ties.
    pub fn fix_phase(&mut self) {
        let mut best = 0;
        let mut best_mag = T::neg_infinity();
        for (i, z) in self.data.iter().enumerate() {
            let m = z.norm();
            if m > best_mag {
                best = i;
                best_mag = m;
            }
        }
        if best_mag > T::zero() {
            let z = self.data[best];
            let phase = z.conj() / z.norm();
            for x in &mut self.data {
                *x *= phase;
            }
            self.data[best] = C::new(self.data[best].norm(), T::zero());
        }
    }
}

impl<T: Real> Index<usize> for CVector<T> {
    type Output = C<T>;

    fn index(&self, i: usize) -> &C<T> {
        &self.data[i]
    }
}

impl<T: Real> IndexMut<usize> for CVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut C<T> {
        &mut self.data[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn solve_recovers_known_solution() {
        let a = CMatrix::<f64>::from_rows(&[
            vec![c(2.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 3.0), c(1.0, -1.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        let x = CMatrix::from_fn(3, |i, j| c((i + 2 * j) as f64, (i as f64) - 1.0));
        let b = a.matmul(&x);
        let got = a.solve(&b).unwrap();
        assert!((&got - &x).norm_max() < 1e-13);
    }

    #[test]
    fn rejects_non_finite_and_bad_shapes() {
        let bad = CMatrix::<f64>::from_row_major(1, vec![c(f64::NAN, 0.0)]);
        assert!(matches!(bad, Err(Error::NonFinite { .. })));
        let bad = CMatrix::<f64>::from_row_major(2, vec![c(0.0, 0.0); 3]);
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn phase_fix_makes_largest_component_real_positive() {
        let mut v = CVector::<f64>::from_vec(vec![c(0.1, 0.0), c(0.0, -2.0), c(1.0, 1.0)]);
        v.fix_phase();
        assert!(v[1].im.abs() < 1e-15 && v[1].re > 0.0);
        assert!((v.norm() - (0.01f64 + 4.0 + 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_vector_does_not_normalize() {
        let v = CVector::<f64>::zeros(3);
        assert_eq!(v.normalized(), Err(Error::ZeroNorm));
    }
}
