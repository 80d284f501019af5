//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 with the standard backward-error thresholds.
//!
//! No eigendecomposition is involved, so defective matrices (exceptional
//! points) are handled exactly like any other input.

use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [
    17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.,
];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

pub fn expm<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    m.check_finite()?;
    let n = m.dim();
    let norm = m.norm_one();
    let ident = CMatrix::identity(n);
    if norm == T::zero() {
        return Ok(ident);
    }

    for (theta, coeffs) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= T::lit(theta) {
            let (u, v) = pade_low(m, coeffs);
            return finish(&u, &v, 0);
        }
    }

    let ratio = (norm / T::lit(THETA_13)).as_f64();
    let squarings = if ratio > 1.0 {
        ratio.log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.scale_real(T::lit(2f64.powi(-squarings)));
    let (u, v) = pade_13(&scaled);
    finish(&u, &v, squarings.max(0) as u32)
}

fn finish<T: Real>(u: &CMatrix<T>, v: &CMatrix<T>, squarings: u32) -> Result<CMatrix<T>> {
    let p = v + u;
    let q = v - u;
    let mut r = q.solve(&p).map_err(|_| Error::Overflow)?;
    for _ in 0..squarings {
        r = r.matmul(&r);
        if !r.is_finite() {
            return Err(Error::Overflow);
        }
    }
    if !r.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(r)
}

/// Odd/even split `U`, `V` of the degree-m Padé numerator for m ≤ 9.
fn pade_low<T: Real>(a: &CMatrix<T>, b: &[f64]) -> (CMatrix<T>, CMatrix<T>) {
    let n = a.dim();
    let a2 = a.matmul(a);
    let mut powers = vec![CMatrix::identity(n), a2.clone()];
    while powers.len() * 2 < b.len() {
        let next = powers.last().unwrap().matmul(&a2);
        powers.push(next);
    }
    let mut u_inner = CMatrix::zeros(n);
    let mut v = CMatrix::zeros(n);
    for (k, pk) in powers.iter().enumerate() {
        if 2 * k + 1 < b.len() {
            u_inner = &u_inner + &pk.scale(cr(T::lit(b[2 * k + 1])));
        }
        if 2 * k < b.len() {
            v = &v + &pk.scale(cr(T::lit(b[2 * k])));
        }
    }
    (a.matmul(&u_inner), v)
}

fn pade_13<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = a.dim();
    let b = |k: usize| cr(T::lit(B13[k]));
    let ident = CMatrix::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let u_hi = &(&a6.scale(b(13)) + &a4.scale(b(11))) + &a2.scale(b(9));
    let u_lo = &(&(&a6.scale(b(7)) + &a4.scale(b(5))) + &a2.scale(b(3))) + &ident.scale(b(1));
    let u = a.matmul(&(&a6.matmul(&u_hi) + &u_lo));

    let v_hi = &(&a6.scale(b(12)) + &a4.scale(b(10))) + &a2.scale(b(8));
    let v_lo = &(&(&a6.scale(b(6)) + &a4.scale(b(4))) + &a2.scale(b(2))) + &ident.scale(b(0));
    let v = &a6.matmul(&v_hi) + &v_lo;
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn zero_matrix_gives_identity() {
        let e = expm(&CMatrix::<f64>::zeros(3)).unwrap();
        assert_eq!(e, CMatrix::identity(3));
    }

    #[test]
    fn diagonal_case() {
        let a = c(1.0, 2.0);
        let b = c(-3.0, 0.0);
        let e = expm(&CMatrix::<f64>::from_diag(&[a, b])).unwrap();
        assert!((e[(0, 0)] - a.exp()).norm() / a.exp().norm() < 1e-13);
        assert!((e[(1, 1)] - b.exp()).norm() / b.exp().norm() < 1e-13);
        assert!(e[(0, 1)].norm() < 1e-15 && e[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn nilpotent_jordan_block() {
        let m = CMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let e = expm(&m).unwrap();
        let want = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!((&e - &want).norm_max() < 1e-15);
    }

    #[test]
    fn large_diagonal_uses_squaring() {
        let e = expm(&CMatrix::<f64>::from_diag(&[
            c(-40.0, 0.0),
            c(0.0, 45.0),
            c(10.0, 3.0),
        ]))
        .unwrap();
        for (k, z) in [c(-40.0, 0.0), c(0.0, 45.0), c(10.0, 3.0)]
            .iter()
            .enumerate()
        {
            let rel = (e[(k, k)] - z.exp()).norm() / z.exp().norm();
            assert!(rel < 1e-12, "{k}: {rel}");
        }
    }

    #[test]
    fn overflow_reported() {
        let m = CMatrix::<f64>::from_diag(&[c(800.0, 0.0)]);
        assert_eq!(expm(&m), Err(Error::Overflow));
    }
}
