use super::expm::expm;
use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Largest `‖H‖₁ · h` allowed for a single sub-step. With this bound a
/// sub-step changes the norm by at most a factor `e`, so renormalising after
/// every sub-step keeps all intermediate amplitudes O(1).
pub const MAX_STEP_NORM: f64 = 1.0;

/// Upper bound on Taylor terms in [`short_step_apply`]; 1/30! is far below
/// double precision.
const MAX_TAYLOR_TERMS: usize = 30;

/// Repeated application of `e^{-iHh}` with renormalisation after every step.
#[derive(Clone, Debug)]
pub struct StepPropagator<T: Real> {
    step: CMatrix<T>,
    h: T,
}

impl<T: Real> StepPropagator<T> {
    pub fn new(hamiltonian: &CMatrix<T>, h: T) -> Result<Self> {
        if !(h >= T::zero()) || !h.is_finite() {
            return Err(Error::InvalidTime(format!(
                "step {h} must be finite and ≥ 0"
            )));
        }
        let generator = hamiltonian.scale(c(T::zero(), -h));
        Ok(Self {
            step: expm(&generator)?,
            h,
        })
    }

    pub fn step_size(&self) -> T {
        self.h
    }

    pub fn step_matrix(&self) -> &CMatrix<T> {
        &self.step
    }

    /// One step followed by renormalisation.
    pub fn advance(&self, psi: &CVector<T>) -> Result<CVector<T>> {
        self.step.apply(psi).normalized()
    }
}

/// `e^{-iHt}ψ` for a short step `‖H‖₁ t ≤ MAX_STEP_NORM`, summed as a Taylor
/// series on the vector until the terms stop contributing.
pub fn short_step_apply<T: Real>(
    hamiltonian: &CMatrix<T>,
    psi: &CVector<T>,
    t: T,
) -> Result<CVector<T>> {
    let x = hamiltonian.norm_one() * t;
    if !(t >= T::zero()) || !(x <= T::lit(MAX_STEP_NORM)) {
        return Err(Error::InvalidTime(format!(
            "short step needs 0 <= t and |H|t <= {MAX_STEP_NORM}, got t = {t}"
        )));
    }
    let generator = c(T::zero(), -t);
    let mut sum = psi.clone();
    let mut term = psi.clone();
    for k in 1..=MAX_TAYLOR_TERMS {
        let coef = generator / T::from_usize_lossy(k);
        term = hamiltonian.apply(&term).scale(coef);
        sum = sum.add(&term);
        if term.norm() <= T::epsilon() * sum.norm() {
            break;
        }
    }
    Ok(sum)
}

/// Number of equal sub-steps used to cover `[0, t]` under `H`.
pub fn substeps_for<T: Real>(hamiltonian: &CMatrix<T>, t: T) -> usize {
    let x = (hamiltonian.norm_one() * t / T::lit(MAX_STEP_NORM)).as_f64();
    if x.is_finite() && x > 1.0 {
        x.ceil() as usize
    } else {
        1
    }
}

/// `e^{-iHt}ψ₀ / ‖e^{-iHt}ψ₀‖`, computed with renormalised sub-steps so the
/// unnormalised amplitude never overflows.
pub fn propagate_normalized<T: Real>(
    hamiltonian: &CMatrix<T>,
    psi0: &CVector<T>,
    t: T,
) -> Result<CVector<T>> {
    if hamiltonian.dim() != psi0.len() {
        return Err(Error::DimensionMismatch {
            expected: hamiltonian.dim(),
            found: psi0.len(),
        });
    }
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::InvalidTime(format!(
            "t = {t} must be finite and ≥ 0"
        )));
    }
    if !psi0.is_finite() {
        return Err(Error::NonFinite { what: "state" });
    }
    if t == T::zero() {
        return psi0.normalized();
    }
    let steps = substeps_for(hamiltonian, t);
    let prop = StepPropagator::new(hamiltonian, t / T::from_usize_lossy(steps))?;
    let mut psi = psi0.normalized()?;
    for _ in 0..steps {
        psi = prop.advance(&psi)?;
    }
    Ok(psi)
}
