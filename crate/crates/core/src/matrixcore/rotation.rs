use crate::scalar::{Real, C};

/// Unitary 2×2 Jacobi rotation that diagonalises the Hermitian block
/// `[[app, apq], [conj(apq), aqq]]`.
///
/// Written as `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` with `apq = |apq| e^{iφ}`,
/// so `J^H · block · J` is diagonal.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rotation<T: Real> {
    pub c: T,
    pub s: T,
    /// `e^{-iφ}`
    pub phase: C<T>,
}

impl<T: Real> Rotation<T> {
    pub fn new(app: T, aqq: T, apq: C<T>) -> Self {
        let mag = apq.norm();
        let phase = apq.conj() / mag;
        let theta = (aqq - app) / (mag + mag);
        let t = if theta.is_infinite() {
            T::zero()
        } else {
            let sgn = if theta >= T::zero() {
                T::one()
            } else {
                -T::one()
            };
            sgn / (theta.abs() + (theta * theta + T::one()).sqrt())
        };
        let c = (t * t + T::one()).sqrt().recip();
        Self { c, s: t * c, phase }
    }

    /// New `(col_p, col_q)` after right-multiplying by `J`.
    #[inline]
    pub fn right(&self, xp: C<T>, xq: C<T>) -> (C<T>, C<T>) {
        (
            xp * self.c - xq * self.phase * self.s,
            xp * self.s + xq * self.phase * self.c,
        )
    }

    /// New `(row_p, row_q)` after left-multiplying by `J^H`.
    #[inline]
    pub fn left(&self, xp: C<T>, xq: C<T>) -> (C<T>, C<T>) {
        let ph = self.phase.conj();
        (
            xp * self.c - xq * ph * self.s,
            xp * self.s + xq * ph * self.c,
        )
    }
}
