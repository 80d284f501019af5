use crate::error::{Error, Result};
use crate::matrixcore::{eig_hermitian, CMatrix};
use crate::scalar::{cmp_real, Real};

/// Tolerance on Hermiticity, unit trace and positivity of a density operator.
pub const DENSITY_TOL: f64 = 1e-10;

/// Occupations and battery levels paired for the passive state: the largest
/// occupation sits on the lowest level.
#[derive(Clone, Debug, PartialEq)]
pub struct PassiveDecomposition<T: Real> {
    pub occupations_desc: Vec<T>,
    pub energies_asc: Vec<T>,
}

impl<T: Real> PassiveDecomposition<T> {
    /// `Σ_k r_k^↓ ε_k^↑`.
    pub fn passive_energy(&self) -> T {
        self.occupations_desc
            .iter()
            .zip(&self.energies_asc)
            .fold(T::zero(), |s, (r, e)| s + *r * *e)
    }
}

fn check_density<T: Real>(rho: &CMatrix<T>) -> Result<()> {
    let tol = T::tol(DENSITY_TOL);
    let dev = rho.hermitian_deviation();
    if dev > tol {
        return Err(Error::InvalidState(format!(
            "not Hermitian (deviation {dev:e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    Ok(())
}

pub fn passive_decomposition<T: Real>(
    rho: &CMatrix<T>,
    h_norm: &CMatrix<T>,
) -> Result<PassiveDecomposition<T>> {
    let energies_asc = eig_hermitian(h_norm)?.real_values();
    passive_with_levels(rho, h_norm, energies_asc)
}

fn passive_with_levels<T: Real>(
    rho: &CMatrix<T>,
    h_norm: &CMatrix<T>,
    energies_asc: Vec<T>,
) -> Result<PassiveDecomposition<T>> {
    if rho.dim() != h_norm.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_norm.dim(),
            found: rho.dim(),
        });
    }
    check_density(rho)?;
    let mut occupations_desc = eig_hermitian(rho)?.real_values();
    if let Some(r) = occupations_desc.iter().find(|r| **r < -T::tol(DENSITY_TOL)) {
        return Err(Error::InvalidState(format!("negative occupation {r:e}")));
    }
    occupations_desc.sort_by(|a, b| cmp_real(*b, *a));
    Ok(PassiveDecomposition {
        occupations_desc,
        energies_asc,
    })
}

/// `Tr[Hρ] − Σ_k r_k^↓ ε_k^↑`: work extractable from `ρ` by unitaries.
pub fn ergotropy<T: Real>(rho: &CMatrix<T>, h_norm: &CMatrix<T>) -> Result<T> {
    let passive = passive_decomposition(rho, h_norm)?;
    let energy = h_norm.matmul(rho).trace().re;
    Ok(energy - passive.passive_energy())
}

/// [`ergotropy`] with the ascending spectrum of `h_norm` supplied, for
/// repeated evaluation against one battery.
pub fn ergotropy_with_levels<T: Real>(
    rho: &CMatrix<T>,
    h_norm: &CMatrix<T>,
    energies_asc: &[T],
) -> Result<T> {
    if energies_asc.len() != h_norm.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_norm.dim(),
            found: energies_asc.len(),
        });
    }
    let passive = passive_with_levels(rho, h_norm, energies_asc.to_vec())?;
    let energy = h_norm.matmul(rho).trace().re;
    Ok(energy - passive.passive_energy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::CVector;
    use crate::scalar::cr;

    fn two_level() -> CMatrix<f64> {
        CMatrix::from_diag(&[cr(-1.0), cr(1.0)])
    }

    #[test]
    fn mixed_state_has_none() {
        let h = CMatrix::<f64>::from_diag(&[cr(-1.0), cr(0.2), cr(1.0)]);
        let rho = CMatrix::identity(3).scale_real(1.0 / 3.0);
        assert!(ergotropy(&rho, &h).unwrap().abs() < 1e-15);
    }

    #[test]
    fn ground_state_has_none() {
        let rho = CMatrix::outer(&CVector::basis(2, 0));
        assert!(ergotropy(&rho, &two_level()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn inverted_state_gives_full_width() {
        let rho = CMatrix::outer(&CVector::basis(2, 1));
        assert!((ergotropy(&rho, &two_level()).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn decomposition_ordering() {
        let rho = CMatrix::<f64>::from_diag(&[cr(0.2), cr(0.7), cr(0.1)]);
        let h = CMatrix::from_diag(&[cr(0.5), cr(-1.0), cr(1.0)]);
        let d = passive_decomposition(&rho, &h).unwrap();
        assert_eq!(d.energies_asc, vec![-1.0, 0.5, 1.0]);
        assert!((d.occupations_desc[0] - 0.7).abs() < 1e-15);
        assert!((d.occupations_desc[2] - 0.1).abs() < 1e-15);
        let total: f64 = d.occupations_desc.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_states_rejected() {
        let h = two_level();
        let bad_trace = CMatrix::<f64>::identity(2);
        assert!(matches!(
            ergotropy(&bad_trace, &h),
            Err(Error::InvalidState(_))
        ));
        let negative = CMatrix::from_diag(&[cr(1.5), cr(-0.5)]);
        assert!(matches!(
            ergotropy(&negative, &h),
            Err(Error::InvalidState(_))
        ));
        let skew = CMatrix::from_real_rows(&[&[0.5, 0.3], &[0.0, 0.5]]).unwrap();
        assert!(matches!(ergotropy(&skew, &h), Err(Error::InvalidState(_))));
    }
}
