//! Lattice operators in the single-excitation site basis and the closed-form
//! Bloch dispersions.
//!
//! Sites are interleaved `A₁ B₁ A₂ B₂ …`, so the sublattice operator Γ is a
//! strict `+1, −1` alternation along the diagonal. Energies are in units of
//! the inter-cell coupling `J₂`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrixcore::{eig_hermitian, CMatrix};
use crate::scalar::{c, cr, Real, C};

/// Smallest spectral width `E_max − E_min` accepted by [`normalize_battery`].
pub const MIN_SPECTRAL_WIDTH: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sublattice {
    A,
    B,
}

/// Physical configuration of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatticeParams<T: Real> {
    n: usize,
    j1: T,
    j2: T,
    gamma: T,
    boundary: Boundary,
}

impl<T: Real> LatticeParams<T> {
    pub fn new(n: usize, j1: T, j2: T, gamma: T, boundary: Boundary) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!(
                "N = {n}, need at least 2 cells"
            )));
        }
        if !j1.is_finite() || j1 < T::zero() {
            return Err(Error::InvalidParams(format!(
                "J1 = {j1} must be finite and >= 0"
            )));
        }
        if !j2.is_finite() || j2 <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "J2 = {j2} must be finite and > 0"
            )));
        }
        if !gamma.is_finite() || gamma < T::zero() {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} must be finite and >= 0"
            )));
        }
        Ok(Self {
            n,
            j1,
            j2,
            gamma,
            boundary,
        })
    }

    /// Open chain with `J₂ = 1`.
    pub fn open(n: usize, j1: T, gamma: T) -> Result<Self> {
        Self::new(n, j1, T::one(), gamma, Boundary::Open)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j1(&self) -> T {
        self.j1
    }

    pub fn j2(&self) -> T {
        self.j2
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of sites, `2N`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Coupling ratio `J₁/J₂`.
    pub fn ratio(&self) -> T {
        self.j1 / self.j2
    }

    pub fn with_n(self, n: usize) -> Result<Self> {
        Self::new(n, self.j1, self.j2, self.gamma, self.boundary)
    }

    pub fn with_j1(self, j1: T) -> Result<Self> {
        Self::new(self.n, j1, self.j2, self.gamma, self.boundary)
    }

    pub fn with_gamma(self, gamma: T) -> Result<Self> {
        Self::new(self.n, self.j1, self.j2, gamma, self.boundary)
    }

    pub fn with_boundary(self, boundary: Boundary) -> Self {
        Self { boundary, ..self }
    }
}

impl<T: Real> Default for LatticeParams<T> {
    /// Six cells, `J₁ = 0.5`, `J₂ = 1`, no gain or loss, open boundary.
    fn default() -> Self {
        Self {
            n: 6,
            j1: T::lit(0.5),
            j2: T::one(),
            gamma: T::zero(),
            boundary: Boundary::Open,
        }
    }
}

/// Maps `(cell, sublattice)` with 1-based cells onto matrix indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteBasis {
    cells: usize,
}

impl SiteBasis {
    pub fn new(cells: usize) -> Self {
        Self { cells }
    }

    pub fn dim(&self) -> usize {
        2 * self.cells
    }

    /// `A_n → 2(n−1)`, `B_n → 2(n−1)+1`. Panics when `cell` is outside `1..=N`.
    pub fn index(&self, cell: usize, sub: Sublattice) -> usize {
        assert!(
            (1..=self.cells).contains(&cell),
            "cell {cell} outside 1..={}",
            self.cells
        );
        let base = 2 * (cell - 1);
        match sub {
            Sublattice::A => base,
            Sublattice::B => base + 1,
        }
    }

    pub fn site(&self, index: usize) -> (usize, Sublattice) {
        assert!(
            index < self.dim(),
            "site {index} outside basis of size {}",
            self.dim()
        );
        let sub = if index % 2 == 0 {
            Sublattice::A
        } else {
            Sublattice::B
        };
        (index / 2 + 1, sub)
    }
}

/// Hermitian SSH chain: `J₁` inside each cell, `J₂` between cells.
pub fn build_ssh<T: Real>(p: &LatticeParams<T>) -> CMatrix<T> {
    let basis = SiteBasis::new(p.n);
    let mut h = CMatrix::zeros(p.dim());
    let mut bond = |i: usize, j: usize, w: T| {
        h[(i, j)] = cr(w);
        h[(j, i)] = cr(w);
    };
    for cell in 1..=p.n {
        bond(
            basis.index(cell, Sublattice::A),
            basis.index(cell, Sublattice::B),
            p.j1,
        );
        if cell < p.n {
            bond(
                basis.index(cell, Sublattice::B),
                basis.index(cell + 1, Sublattice::A),
                p.j2,
            );
        }
    }
    if p.boundary == Boundary::Periodic {
        bond(
            basis.index(p.n, Sublattice::B),
            basis.index(1, Sublattice::A),
            p.j2,
        );
    }
    h
}

/// Sublattice operator Γ: `+1` on A sites, `−1` on B sites.
pub fn build_gamma<T: Real>(p: &LatticeParams<T>) -> CMatrix<T> {
    let diag: Vec<C<T>> = (0..p.dim())
        .map(|i| {
            if i % 2 == 0 {
                cr(T::one())
            } else {
                cr(-T::one())
            }
        })
        .collect();
    CMatrix::from_diag(&diag)
}

/// `H_SSH + iγΓ`: gain on A sites, loss on B sites.
pub fn build_pt<T: Real>(p: &LatticeParams<T>) -> CMatrix<T> {
    let mut h = build_ssh(p);
    for i in 0..p.dim() {
        let sign = if i % 2 == 0 { p.gamma } else { -p.gamma };
        h[(i, i)] = h[(i, i)] + c(T::zero(), sign);
    }
    h
}

/// 2×2 Bloch matrix `[[iγ, J₁ + J₂e^{−ik}], [J₁ + J₂e^{ik}, −iγ]]`.
pub fn bloch<T: Real>(p: &LatticeParams<T>, k: T) -> CMatrix<T> {
    let off = cr(p.j1) + C::from_polar(p.j2, -k);
    let mut m = CMatrix::zeros(2);
    m[(0, 0)] = c(T::zero(), p.gamma);
    m[(0, 1)] = off;
    m[(1, 0)] = off.conj();
    m[(1, 1)] = c(T::zero(), -p.gamma);
    m
}

fn bulk_radicand<T: Real>(p: &LatticeParams<T>, k: T) -> T {
    let two = T::lit(2.0);
    p.j1 * p.j1 + p.j2 * p.j2 + two * p.j1 * p.j2 * k.cos()
}

/// Upper and lower bands `±√(J₁² + J₂² + 2J₁J₂ cos k)` of the Hermitian chain.
pub fn dispersion_hermitian<T: Real>(p: &LatticeParams<T>, k: T) -> (T, T) {
    let e = bulk_radicand(p, k).max(T::zero()).sqrt();
    (e, -e)
}

/// `±√(J₁² + J₂² + 2J₁J₂ cos k − γ²)` on the principal branch: real when the
/// radicand is non-negative, purely imaginary otherwise.
pub fn dispersion_pt<T: Real>(p: &LatticeParams<T>, k: T) -> (C<T>, C<T>) {
    let r = bulk_radicand(p, k) - p.gamma * p.gamma;
    let e = if r >= T::zero() {
        cr(r.sqrt())
    } else {
        c(T::zero(), (-r).sqrt())
    };
    (e, -e)
}

/// Rescales a Hermitian operator so its spectrum spans exactly `[−1, 1]`:
/// `(2H − (E_max + E_min)) / (E_max − E_min)`.
pub fn normalize_battery<T: Real>(h: &CMatrix<T>) -> Result<CMatrix<T>> {
    let es = eig_hermitian(h)?;
    let values = es.real_values();
    let emin = values[0];
    let emax = values[values.len() - 1];
    let spread = emax - emin;
    if !(spread >= T::tol(MIN_SPECTRAL_WIDTH)) {
        return Err(Error::DegenerateSpectrum {
            spread: spread.as_f64(),
        });
    }
    let two = T::lit(2.0);
    Ok(h.scale_real(two)
        .shift(cr(-(emax + emin)))
        .scale_real(spread.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::eig_general;

    fn params(n: usize, j1: f64, gamma: f64) -> LatticeParams<f64> {
        LatticeParams::open(n, j1, gamma).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LatticeParams::<f64>::open(1, 0.5, 0.0).is_err());
        assert!(LatticeParams::<f64>::open(4, -0.1, 0.0).is_err());
        assert!(LatticeParams::<f64>::new(4, 0.5, 0.0, 0.0, Boundary::Open).is_err());
        assert!(LatticeParams::<f64>::open(4, 0.5, -1.0).is_err());
        assert!(LatticeParams::<f64>::open(4, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn site_basis_round_trip() {
        let b = SiteBasis::new(5);
        for i in 0..b.dim() {
            let (cell, sub) = b.site(i);
            assert_eq!(b.index(cell, sub), i);
        }
        assert_eq!(b.index(1, Sublattice::A), 0);
        assert_eq!(b.index(3, Sublattice::B), 5);
    }

    #[test]
    fn two_cell_open_chain_entries() {
        let h = build_ssh(&params(2, 0.5, 0.0));
        let want = CMatrix::from_real_rows(&[
            &[0.0, 0.5, 0.0, 0.0],
            &[0.5, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.5],
            &[0.0, 0.0, 0.5, 0.0],
        ])
        .unwrap();
        assert_eq!(h, want);
    }

    #[test]
    fn periodic_bond_closes_ring() {
        let p = params(3, 0.5, 0.0).with_boundary(Boundary::Periodic);
        let h = build_ssh(&p);
        assert_eq!(h[(5, 0)], cr(1.0));
        assert_eq!(h[(0, 5)], cr(1.0));
    }

    #[test]
    fn uniform_chain_spectrum() {
        let es = eig_hermitian(&build_ssh(&params(6, 1.0, 0.0))).unwrap();
        let mut want: Vec<f64> = (1..=12)
            .map(|j| 2.0 * (j as f64 * std::f64::consts::PI / 13.0).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (e, w) in es.real_values().iter().zip(&want) {
            assert!((e - w).abs() < 1e-12, "{e} vs {w}");
        }
    }

    #[test]
    fn topological_chain_has_midgap_pair() {
        let es = eig_hermitian(&build_ssh(&params(6, 0.5, 0.0))).unwrap();
        let small: Vec<f64> = es
            .real_values()
            .into_iter()
            .filter(|e| e.abs() < 0.02)
            .collect();
        assert_eq!(small.len(), 2);
        assert!((small[0] + small[1]).abs() < 1e-12);
    }

    #[test]
    fn gamma_operator() {
        let g = build_gamma(&params(2, 0.5, 0.0));
        assert_eq!(g.diagonal(), vec![cr(1.0), cr(-1.0), cr(1.0), cr(-1.0)]);
        assert_eq!(g.trace(), cr(0.0));
        assert_eq!(g.matmul(&g), CMatrix::identity(4));
    }

    #[test]
    fn pt_hamiltonian_diagonal_and_limit() {
        let p = params(2, 0.5, 0.3);
        let h = build_pt(&p);
        assert_eq!(
            h.diagonal(),
            vec![c(0.0, 0.3), c(0.0, -0.3), c(0.0, 0.3), c(0.0, -0.3)]
        );
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(h[(i, j)], build_ssh(&p)[(i, j)]);
                }
            }
        }
        let p0 = params(5, 0.7, 0.0);
        assert_eq!(build_pt(&p0), build_ssh(&p0));
    }

    #[test]
    fn pt_spectrum_is_conjugation_invariant() {
        let es = eig_general(&build_pt(&params(6, 0.5, 1.0))).unwrap();
        for e in &es.eigenvalues {
            let best = es
                .eigenvalues
                .iter()
                .map(|f| (f - e.conj()).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9, "{e} has no conjugate partner");
        }
    }

    #[test]
    fn bloch_matrix_forms() {
        let p = params(4, 0.5, 0.0);
        let m = bloch(&p, 0.0);
        assert_eq!(m[(0, 1)], cr(1.5));
        assert_eq!(m[(1, 0)], cr(1.5));
        let crit = params(4, 1.0, 0.0);
        let m = bloch(&crit, std::f64::consts::PI);
        assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn bloch_eigenvalues_match_dispersion() {
        let p = params(4, 0.5, 0.0);
        for i in 0..100 {
            let k =
                -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (i as f64 * 0.618_034).fract();
            let es = eig_hermitian(&bloch(&p, k)).unwrap();
            let (up, down) = dispersion_hermitian(&p, k);
            assert!((es.eigenvalues[0].re - down).abs() < 1e-12);
            assert!((es.eigenvalues[1].re - up).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_dispersion_values() {
        assert_eq!(dispersion_hermitian(&params(4, 0.5, 0.0), 0.0), (1.5, -1.5));
        let crit = dispersion_hermitian(&params(4, 1.0, 0.0), std::f64::consts::PI);
        assert!(crit.0.abs() < 1e-15);
        let flat = params(4, 0.0, 0.0);
        for k in [-2.0, 0.3, 1.7] {
            assert_eq!(dispersion_hermitian(&flat, k), (1.0, -1.0));
        }
    }

    #[test]
    fn pt_dispersion_values() {
        let (up, down) = dispersion_pt(&params(4, 0.5, 2.8), 0.0);
        let want = (2.8f64 * 2.8 - 1.5 * 1.5).sqrt();
        assert!((up - c(0.0, want)).norm() < 1e-12);
        assert!((down - c(0.0, -want)).norm() < 1e-12);
        assert!((want - 2.364_318_083_507_378).abs() < 1e-12);

        let (a, b) = dispersion_pt(&params(4, 0.5, 0.5), std::f64::consts::PI);
        assert!(a.norm() < 1e-7 && b.norm() < 1e-7);

        let p = params(4, 0.3, 0.0);
        for k in [-3.0, -1.0, 0.0, 2.5] {
            let (u, _) = dispersion_pt(&p, k);
            assert_eq!(u, cr(dispersion_hermitian(&p, k).0));
        }
    }

    #[test]
    fn normalize_examples() {
        let h = CMatrix::<f64>::from_diag(&[cr(0.0), cr(2.0)]);
        let n = normalize_battery(&h).unwrap();
        assert!((&n - &CMatrix::from_diag(&[cr(-1.0), cr(1.0)])).norm_max() < 1e-15);
        let again = normalize_battery(&n).unwrap();
        assert!((&again - &n).norm_max() < 1e-12);
        assert!(matches!(
            normalize_battery(&CMatrix::<f64>::identity(3)),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn normalized_ssh_spectrum() {
        let n = normalize_battery(&build_ssh(&params(6, 0.5, 0.0))).unwrap();
        let v = eig_hermitian(&n).unwrap().real_values();
        assert!((v[0] + 1.0).abs() < 1e-12);
        assert!((v[11] - 1.0).abs() < 1e-12);
        assert!(v[5].abs() < 0.02 && v[6].abs() < 0.02);
    }
}
