//! Charging dynamics: ground-state preparation, normalised non-Hermitian
//! evolution, stored energy, eigenbasis populations, ergotropy and the
//! late-time dominant mode.

mod asymptotic;
mod ergotropy;
mod trajectory;

pub use asymptotic::{asymptotic_delta_e, asymptotic_state, AsymptoticState, FALLBACK_T_MAX};
pub use ergotropy::{
    ergotropy, ergotropy_with_levels, passive_decomposition, PassiveDecomposition, DENSITY_TOL,
};
pub use trajectory::{internal_step, time_grid, Trajectory};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_pt, build_ssh, normalize_battery, LatticeParams};
use crate::matrixcore::{eig_hermitian, CMatrix, CVector, EigenSystem};
use crate::scalar::Real;
use crate::spectral::bulk_ep_thresholds;

/// Minimum gap between the two lowest levels for a well-defined ground state.
pub const GROUND_GAP_TOL: f64 = 1e-10;
/// Default output spacing.
pub const DEFAULT_DT: f64 = 0.01;
/// Default horizon when γ is below the inner bulk threshold.
pub const DEFAULT_T_MAX_UNBROKEN: f64 = 200.0;
/// Default horizon once the bulk is broken (γ ≥ |J₁ − J₂|).
pub const DEFAULT_T_MAX_BULK_BROKEN: f64 = 100.0;

/// Horizon used for `p` when none is given.
pub fn default_t_max<T: Real>(p: &LatticeParams<T>) -> T {
    let (inner, _) = bulk_ep_thresholds(p);
    if p.gamma() > T::zero() && p.gamma() >= inner {
        T::lit(DEFAULT_T_MAX_BULK_BROKEN)
    } else {
        T::lit(DEFAULT_T_MAX_UNBROKEN)
    }
}

fn checked_ground<T: Real>(es: &EigenSystem<T>) -> Result<CVector<T>> {
    let values = es.real_values();
    if values.len() > 1 {
        let gap = values[1] - values[0];
        if gap < T::tol(GROUND_GAP_TOL) {
            return Err(Error::DegenerateGround { gap: gap.as_f64() });
        }
    }
    Ok(es.vectors[0].clone())
}

/// Lowest eigenvector of a Hermitian operator.
pub fn ground_state<T: Real>(h_ssh: &CMatrix<T>) -> Result<CVector<T>> {
    checked_ground(&eig_hermitian(h_ssh)?)
}

/// Everything fixed by the lattice parameters before charging starts.
#[derive(Clone, Debug)]
pub struct Battery<T: Real> {
    pub params: LatticeParams<T>,
    pub h_ssh: CMatrix<T>,
    pub h_pt: CMatrix<T>,
    /// Battery Hamiltonian with spectrum rescaled to `[−1, 1]`.
    pub h_norm: CMatrix<T>,
    /// Orthonormal eigenbasis `φ_j` of `H_SSH`, ascending energy.
    pub basis: EigenSystem<T>,
    pub psi0: CVector<T>,
    e0: T,
}

impl<T: Real> Battery<T> {
    pub fn new(params: LatticeParams<T>) -> Result<Self> {
        let h_ssh = build_ssh(&params);
        let basis = eig_hermitian(&h_ssh)?;
        let psi0 = checked_ground(&basis)?;
        let h_norm = normalize_battery(&h_ssh)?;
        let e0 = h_norm.expectation(&psi0).re;
        Ok(Self {
            params,
            h_pt: build_pt(&params),
            h_ssh,
            h_norm,
            basis,
            psi0,
            e0,
        })
    }

    /// `⟨ψ|H_B^norm|ψ⟩ − ⟨ψ₀|H_B^norm|ψ₀⟩` for a unit vector `ψ`.
    pub fn delta_e(&self, psi: &CVector<T>) -> T {
        self.h_norm.expectation(psi).re - self.e0
    }

    /// `|⟨φ_j|ψ⟩|²` for every eigenvector of `H_SSH`.
    pub fn populations(&self, psi: &CVector<T>) -> Vec<T> {
        self.basis
            .vectors
            .iter()
            .map(|phi| phi.dot(psi).norm_sqr())
            .collect()
    }
}

/// Time series of a charging run.
#[derive(Clone, Debug)]
pub struct ChargingTrace<T: Real> {
    pub params: LatticeParams<T>,
    pub times: Vec<T>,
    pub states: Vec<CVector<T>>,
    pub delta_e: Vec<T>,
    /// `populations[k][j] = |⟨φ_j|ψ(t_k)⟩|²`.
    pub populations: Vec<Vec<T>>,
}

impl<T: Real> ChargingTrace<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `ρ(t_k) = |ψ⟩⟨ψ|`.
    pub fn density(&self, k: usize) -> CMatrix<T> {
        CMatrix::outer(&self.states[k])
    }

    /// Population time series of level `j` (0-based).
    pub fn population_series(&self, j: usize) -> Vec<T> {
        self.populations.iter().map(|row| row[j]).collect()
    }
}

/// Charges the battery from the `H_SSH` ground state under `H_PT` and records
/// the normalised state on the grid `0, dt, 2dt, …, ≤ t_max`.
pub fn evolve<T: Real>(p: &LatticeParams<T>, t_max: T, dt: T) -> Result<ChargingTrace<T>> {
    evolve_battery(&Battery::new(*p)?, t_max, dt)
}

pub fn evolve_battery<T: Real>(b: &Battery<T>, t_max: T, dt: T) -> Result<ChargingTrace<T>> {
    let times = time_grid(t_max, dt)?;
    let mut traj = Trajectory::new(&b.h_pt, &b.psi0)?;
    let mut states = Vec::with_capacity(times.len());
    let mut delta_e = Vec::with_capacity(times.len());
    let mut populations = Vec::with_capacity(times.len());
    for &t in &times {
        let psi = traj.state_at(t)?;
        delta_e.push(b.delta_e(&psi));
        populations.push(b.populations(&psi));
        states.push(psi);
    }
    Ok(ChargingTrace {
        params: b.params,
        times,
        states,
        delta_e,
        populations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::CMatrix;
    use crate::scalar::c;

    fn open(n: usize, j1: f64, gamma: f64) -> LatticeParams<f64> {
        LatticeParams::open(n, j1, gamma).unwrap()
    }

    #[test]
    fn dimer_ground_state() {
        let h = CMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let g = ground_state(&h).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((g[1] - c(-s, 0.0)).norm() < 1e-15);
        assert!((h.expectation(&g).re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_ground_rejected() {
        let h = CMatrix::<f64>::identity(3);
        assert!(matches!(
            ground_state(&h),
            Err(Error::DegenerateGround { .. })
        ));
    }

    #[test]
    fn chain_ground_energy_mirrors_top() {
        let b = Battery::new(open(6, 0.5, 0.0)).unwrap();
        let v = b.basis.real_values();
        let e = b.h_ssh.expectation(&b.psi0).re;
        assert!((e + v[11]).abs() < 1e-12);
        assert!((b.h_norm.expectation(&b.psi0).re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_limit_is_stationary() {
        let tr = evolve(&open(6, 0.5, 0.0), 20.0, 0.05).unwrap();
        assert!(tr.delta_e[0].abs() < 1e-12);
        for d in &tr.delta_e {
            assert!(d.abs() < 1e-10, "{d}");
        }
    }

    #[test]
    fn trace_invariants() {
        let tr = evolve(&open(4, 0.5, 1.0), 10.0, 0.1).unwrap();
        assert_eq!(tr.len(), 101);
        for (k, row) in tr.populations.iter().enumerate() {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
            assert!((-2.0..=2.0).contains(&tr.delta_e[k]));
            let rho = tr.density(k);
            let purity = rho.matmul(&rho).trace().re;
            assert!((purity - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fully_broken_trace_rises_monotonically() {
        let tr = evolve(&open(6, 0.5, 2.8), 20.0, 0.01).unwrap();
        for w in tr.delta_e[1..].windows(2) {
            assert!(w[1] >= w[0] - 1e-6);
        }
        assert!(tr.delta_e.last().unwrap() > &0.9);
    }

    #[test]
    fn weak_drive_stays_in_extremal_pair() {
        for j1 in [0.5, 1.5] {
            let tr = evolve(&open(6, j1, 0.01), 200.0, 0.05).unwrap();
            let amp = tr.delta_e.iter().fold(0.0f64, |a, d| a.max(d.abs()));
            assert!(amp < 1e-3, "J1={j1}: {amp}");
            for row in &tr.populations {
                assert!(row[0] + row[11] > 0.99);
            }
        }
    }

    #[test]
    fn default_horizons() {
        assert_eq!(default_t_max(&open(6, 0.5, 0.45)), 200.0);
        assert_eq!(default_t_max(&open(6, 0.5, 1.0)), 100.0);
        assert_eq!(default_t_max(&open(6, 1.5, 0.45)), 200.0);
        assert_eq!(default_t_max(&open(6, 1.0, 0.0)), 200.0);
    }
}
