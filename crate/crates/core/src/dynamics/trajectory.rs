use crate::error::{Error, Result};
use crate::matrixcore::{short_step_apply, CMatrix, CVector, StepPropagator, MAX_STEP_NORM};
use crate::scalar::Real;

/// Largest internal step; halved until `‖H‖₁ · h ≤ MAX_STEP_NORM`.
const BASE_STEP: f64 = 1.0 / 128.0;

/// Power-of-two step used for the internal trajectory of `h`.
///
/// The internal grid depends on the Hamiltonian only, never on the output
/// spacing, so the state at a given time is the same bit pattern whatever
/// output grid requested it.
pub fn internal_step<T: Real>(h: &CMatrix<T>) -> T {
    let norm = h.norm_one();
    let mut step = T::lit(BASE_STEP);
    let limit = T::lit(MAX_STEP_NORM);
    while norm * step > limit && step > T::min_positive_value() {
        step = step * T::lit(0.5);
    }
    step
}

/// Output times `k · dt` for `k = 0, 1, …` up to `t_max`.
pub fn time_grid<T: Real>(t_max: T, dt: T) -> Result<Vec<T>> {
    if !(t_max > T::zero()) || !t_max.is_finite() {
        return Err(Error::InvalidTime(format!(
            "t_max = {t_max} must be finite and > 0"
        )));
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidTime(format!(
            "dt = {dt} must be finite and > 0"
        )));
    }
    if dt > t_max {
        return Err(Error::InvalidTime(format!(
            "dt = {dt} exceeds t_max = {t_max}"
        )));
    }
    let steps = (t_max / dt + T::lit(1e-9)).floor();
    let steps = steps.to_usize().ok_or_else(|| {
        Error::InvalidTime(format!("t_max / dt = {steps} is not a usable step count"))
    })?;
    Ok((0..=steps).map(|k| dt * T::from_usize_lossy(k)).collect())
}

/// Forward-only normalised propagation along the internal grid of a fixed
/// Hamiltonian. Requested times off the grid are reached with one partial
/// step from the last grid point, which leaves the grid trajectory itself
/// untouched.
#[derive(Clone, Debug)]
pub struct Trajectory<'a, T: Real> {
    h: &'a CMatrix<T>,
    step: StepPropagator<T>,
    psi: CVector<T>,
    index: u64,
}

impl<'a, T: Real> Trajectory<'a, T> {
    pub fn new(h: &'a CMatrix<T>, psi0: &CVector<T>) -> Result<Self> {
        if h.dim() != psi0.len() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: psi0.len(),
            });
        }
        h.check_finite()?;
        Ok(Self {
            h,
            step: StepPropagator::new(h, internal_step(h))?,
            psi: psi0.normalized()?,
            index: 0,
        })
    }

    pub fn step_size(&self) -> T {
        self.step.step_size()
    }

    /// Normalised state at time `t`. Times must be requested in
    /// non-decreasing order of their grid cell.
    pub fn state_at(&mut self, t: T) -> Result<CVector<T>> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::InvalidTime(format!(
                "t = {t} must be finite and >= 0"
            )));
        }
        let h = self.step.step_size();
        let cell = (t / h).floor();
        let target = cell
            .to_u64()
            .ok_or_else(|| Error::InvalidTime(format!("t = {t} too large")))?;
        if target < self.index {
            return Err(Error::InvalidTime(format!(
                "t = {t} lies before the current trajectory position"
            )));
        }
        while self.index < target {
            self.psi = self.step.advance(&self.psi)?;
            self.index += 1;
        }
        let rest = t - cell * h;
        if rest == T::zero() {
            Ok(self.psi.clone())
        } else {
            short_step_apply(self.h, &self.psi, rest)?.normalized()
        }
    }
}
