//! Exceptional-point thresholds, PT/topological phase classification,
//! spectrum sweeps in γ and the γ–J₁ phase diagram.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::check_increasing;
use crate::hamiltonian::{build_pt, Boundary, LatticeParams};
use crate::matrixcore::eig_general;
use crate::scalar::{cmp_real, Real, C};

/// `|Im E|` above this counts as a broken (complex) eigenvalue.
pub const IMAG_THRESHOLD: f64 = 1e-9;
/// `|J₁ − J₂|` below this is treated as the critical line.
pub const CRITICAL_TOL: f64 = 1e-12;
/// Absolute tolerance of [`detect_breaking_threshold`].
pub const BISECTION_TOL: f64 = 1e-6;
/// Points per axis of the default phase-diagram grid.
pub const DEFAULT_DIAGRAM_STEPS: usize = 201;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Topology {
    Trivial,
    Topological,
    Critical,
}

impl Topology {
    pub fn label(self) -> &'static str {
        match self {
            Topology::Trivial => "Trivial",
            Topology::Topological => "Topological",
            Topology::Critical => "Critical",
        }
    }
}

/// PT regimes in order of increasing breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PtRegime {
    Unbroken,
    EdgeBroken,
    PartiallyBroken,
    FullyBroken,
}

impl PtRegime {
    pub fn label(self) -> &'static str {
        match self {
            PtRegime::Unbroken => "Unbroken",
            PtRegime::EdgeBroken => "Edge-broken",
            PtRegime::PartiallyBroken => "Partially broken",
            PtRegime::FullyBroken => "Fully broken",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PhaseLabel {
    pub topology: Topology,
    pub pt_regime: PtRegime,
}

/// Edge exceptional point of the hybridised midgap doublet,
/// `γ_e = J₁ (1 − r²)/(1 − r^{2N}) · r^{N−1}` with `r = J₁/J₂`.
///
/// Returns `None` outside the topological phase, where there are no edge
/// states.
pub fn edge_ep_threshold<T: Real>(p: &LatticeParams<T>) -> Result<Option<T>> {
    if p.boundary() != Boundary::Open {
        return Err(Error::BoundaryMismatch);
    }
    if topology(p) != Topology::Topological {
        return Ok(None);
    }
    let r = p.ratio();
    let n = p.n() as i32;
    let r2 = r * r;
    Ok(Some(
        p.j1() * (T::one() - r2) / (T::one() - r2.powi(n)) * r.powi(n - 1),
    ))
}

/// Inner and outer bulk exceptional points `(|J₁ − J₂|, J₁ + J₂)`.
pub fn bulk_ep_thresholds<T: Real>(p: &LatticeParams<T>) -> (T, T) {
    ((p.j1() - p.j2()).abs(), p.j1() + p.j2())
}

pub fn topology<T: Real>(p: &LatticeParams<T>) -> Topology {
    let d = p.j1() - p.j2();
    if d.abs() < T::tol(CRITICAL_TOL) {
        Topology::Critical
    } else if d < T::zero() {
        Topology::Topological
    } else {
        Topology::Trivial
    }
}

/// Classifies `p` into its topological phase and PT regime. A γ lying
/// exactly on a threshold goes to the more broken side; γ = 0 is always
/// unbroken. Periodic chains have no edge regime.
pub fn classify<T: Real>(p: &LatticeParams<T>) -> PhaseLabel {
    let topology = topology(p);
    let gamma = p.gamma();
    let (inner, outer) = bulk_ep_thresholds(p);
    let edge = match p.boundary() {
        Boundary::Open => edge_ep_threshold(p).ok().flatten(),
        Boundary::Periodic => None,
    };
    let pt_regime = if gamma == T::zero() {
        PtRegime::Unbroken
    } else if gamma >= outer {
        PtRegime::FullyBroken
    } else if gamma >= inner {
        PtRegime::PartiallyBroken
    } else if edge.is_some_and(|ge| gamma >= ge) {
        PtRegime::EdgeBroken
    } else {
        PtRegime::Unbroken
    };
    PhaseLabel {
        topology,
        pt_regime,
    }
}

/// Spectrum of `H_PT` along a γ grid.
#[derive(Clone, Debug)]
pub struct SpectralSweep<T: Real> {
    pub gamma_grid: Vec<T>,
    /// Per γ, the `2N` eigenvalues sorted by real then imaginary part.
    pub eigenvalues: Vec<Vec<C<T>>>,
    /// Per γ, whether the eigenvector matrix was near-defective.
    pub ep_flags: Vec<bool>,
}

impl<T: Real> SpectralSweep<T> {
    /// Number of eigenvalues with `|Im E| > threshold` at each γ.
    pub fn complex_counts(&self, threshold: T) -> Vec<usize> {
        self.eigenvalues
            .iter()
            .map(|row| row.iter().filter(|e| e.im.abs() > threshold).count())
            .collect()
    }

    /// First grid γ at which any eigenvalue has `|Im E| > threshold`.
    pub fn first_breaking(&self, threshold: T) -> Option<T> {
        self.complex_counts(threshold)
            .iter()
            .position(|&k| k > 0)
            .map(|i| self.gamma_grid[i])
    }
}

/// Diagonalises `H_PT` at every γ of the grid (concurrently, results in grid
/// order). Imaginary parts below [`IMAG_THRESHOLD`] are set to zero and the
/// remaining complex eigenvalues are symmetrised into exact conjugate pairs.
pub fn sweep_spectrum<T: Real>(p: &LatticeParams<T>, gamma_grid: &[T]) -> Result<SpectralSweep<T>> {
    check_increasing("gamma", gamma_grid)?;
    let rows: Vec<(Vec<C<T>>, bool)> = gamma_grid
        .par_iter()
        .map(|&gamma| {
            let at = |source: Error| Error::AtGamma {
                gamma: gamma.as_f64(),
                source: Box::new(source),
            };
            let q = p.with_gamma(gamma).map_err(at)?;
            let es = eig_general(&build_pt(&q)).map_err(at)?;
            let flag = es.near_defective();
            Ok((pair_conjugates(es.eigenvalues), flag))
        })
        .collect::<Result<_>>()?;
    let (eigenvalues, ep_flags) = rows.into_iter().unzip();
    Ok(SpectralSweep {
        gamma_grid: gamma_grid.to_vec(),
        eigenvalues,
        ep_flags,
    })
}

fn pair_conjugates<T: Real>(mut values: Vec<C<T>>) -> Vec<C<T>> {
    let threshold = T::tol(IMAG_THRESHOLD);
    for e in values.iter_mut() {
        if e.im.abs() <= threshold {
            e.im = T::zero();
        }
    }
    let mut used = vec![false; values.len()];
    for i in 0..values.len() {
        if used[i] || values[i].im <= T::zero() {
            continue;
        }
        let partner = (0..values.len())
            .filter(|&j| !used[j] && j != i && values[j].im < T::zero())
            .min_by(|&a, &b| {
                cmp_real(
                    (values[a] - values[i].conj()).norm(),
                    (values[b] - values[i].conj()).norm(),
                )
            });
        if let Some(j) = partner {
            let mean = (values[i] + values[j].conj()) * T::lit(0.5);
            values[i] = mean;
            values[j] = mean.conj();
            used[i] = true;
            used[j] = true;
        }
    }
    values.sort_by(|a, b| cmp_real(a.re, b.re).then(cmp_real(a.im, b.im)));
    values
}

fn is_broken<T: Real>(p: &LatticeParams<T>, gamma: T) -> Result<bool> {
    let q = p.with_gamma(gamma)?;
    let es = eig_general(&build_pt(&q)).map_err(|source| Error::AtGamma {
        gamma: gamma.as_f64(),
        source: Box::new(source),
    })?;
    Ok(es.max_abs_imag() > T::tol(IMAG_THRESHOLD))
}

/// Smallest γ at which `H_PT` acquires a complex eigenvalue, located by
/// bisection on `[0, J₁ + J₂ + 1]` to [`BISECTION_TOL`].
pub fn detect_breaking_threshold<T: Real>(p: &LatticeParams<T>) -> Result<T> {
    let mut lo = T::zero();
    let mut hi = p.j1() + p.j2() + T::one();
    let bracket = || Error::BracketFailure {
        lo: 0.0,
        hi: (p.j1() + p.j2() + T::one()).as_f64(),
    };
    if is_broken(p, lo)? || !is_broken(p, hi)? {
        return Err(bracket());
    }
    let tol = T::tol(BISECTION_TOL);
    while hi - lo > tol {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if is_broken(p, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

/// Analytic threshold curves at one J₁ value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint<T: Real> {
    pub j1: T,
    /// Edge EP, absent outside the topological phase.
    pub edge: Option<T>,
    pub inner: T,
    pub outer: T,
}

/// Labels over a J₁ × γ grid; `labels[i][k]` is at `(j1_grid[i], gamma_grid[k])`.
#[derive(Clone, Debug)]
pub struct PhaseDiagram<T: Real> {
    pub j1_grid: Vec<T>,
    pub gamma_grid: Vec<T>,
    pub labels: Vec<Vec<PhaseLabel>>,
    pub boundaries: Vec<BoundaryPoint<T>>,
}

impl<T: Real> PhaseDiagram<T> {
    /// Distinct PT regimes that occur for the given topology, in order.
    pub fn regimes_for(&self, topology: Topology) -> Vec<PtRegime> {
        let mut seen: Vec<PtRegime> = self
            .labels
            .iter()
            .flatten()
            .filter(|l| l.topology == topology)
            .map(|l| l.pt_regime)
            .collect();
        seen.sort();
        seen.dedup();
        seen
    }
}

pub fn phase_diagram<T: Real>(
    j1_grid: &[T],
    gamma_grid: &[T],
    p_base: &LatticeParams<T>,
) -> Result<PhaseDiagram<T>> {
    check_increasing("J1", j1_grid)?;
    check_increasing("gamma", gamma_grid)?;
    let columns: Vec<(Vec<PhaseLabel>, BoundaryPoint<T>)> = j1_grid
        .par_iter()
        .map(|&j1| {
            let q = p_base.with_j1(j1)?;
            let labels = gamma_grid
                .iter()
                .map(|&g| q.with_gamma(g).map(|r| classify(&r)))
                .collect::<Result<Vec<_>>>()?;
            let (inner, outer) = bulk_ep_thresholds(&q);
            let edge = match q.boundary() {
                Boundary::Open => edge_ep_threshold(&q)?,
                Boundary::Periodic => None,
            };
            Ok((
                labels,
                BoundaryPoint {
                    j1,
                    edge,
                    inner,
                    outer,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let (labels, boundaries) = columns.into_iter().unzip();
    Ok(PhaseDiagram {
        j1_grid: j1_grid.to_vec(),
        gamma_grid: gamma_grid.to_vec(),
        labels,
        boundaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;

    fn open(n: usize, j1: f64, gamma: f64) -> LatticeParams<f64> {
        LatticeParams::open(n, j1, gamma).unwrap()
    }

    #[test]
    fn edge_threshold_value() {
        let ge = edge_ep_threshold(&open(6, 0.5, 0.0)).unwrap().unwrap();
        // 0.5 · 0.75 / (1 − 0.5¹²) · 0.5⁵
        assert!((ge - 0.011_721_611_721_611_72).abs() < 1e-15, "{ge}");
        assert_eq!(edge_ep_threshold(&open(6, 1.5, 0.0)).unwrap(), None);
        assert_eq!(edge_ep_threshold(&open(6, 0.0, 0.0)).unwrap(), Some(0.0));
        let per = open(6, 0.5, 0.0).with_boundary(Boundary::Periodic);
        assert_eq!(edge_ep_threshold(&per), Err(Error::BoundaryMismatch));
    }

    #[test]
    fn edge_threshold_geometric_decay() {
        let g = |n| edge_ep_threshold(&open(n, 0.5, 0.0)).unwrap().unwrap();
        let ratio = g(30) / g(29);
        assert!((ratio - 0.5).abs() < 1e-8);
    }

    #[test]
    fn bulk_thresholds() {
        assert_eq!(bulk_ep_thresholds(&open(6, 0.5, 0.0)), (0.5, 1.5));
        assert_eq!(bulk_ep_thresholds(&open(6, 1.0, 0.0)), (0.0, 2.0));
        assert_eq!(bulk_ep_thresholds(&open(6, 0.0, 0.0)), (1.0, 1.0));
    }

    #[test]
    fn classification_examples() {
        let l = classify(&open(6, 0.5, 0.45));
        assert_eq!(
            (l.topology, l.pt_regime),
            (Topology::Topological, PtRegime::EdgeBroken)
        );
        let l = classify(&open(6, 1.5, 0.45));
        assert_eq!(
            (l.topology, l.pt_regime),
            (Topology::Trivial, PtRegime::Unbroken)
        );
        let l = classify(&open(6, 0.5, 2.8));
        assert_eq!(
            (l.topology, l.pt_regime),
            (Topology::Topological, PtRegime::FullyBroken)
        );
        assert_eq!(classify(&open(6, 1.0, 0.0)).topology, Topology::Critical);
        assert_eq!(classify(&open(6, 1.0, 0.0)).pt_regime, PtRegime::Unbroken);
        // exactly on a threshold goes to the broken side
        assert_eq!(
            classify(&open(6, 0.5, 0.5)).pt_regime,
            PtRegime::PartiallyBroken
        );
        assert_eq!(
            classify(&open(6, 0.5, 1.5)).pt_regime,
            PtRegime::FullyBroken
        );
    }

    #[test]
    fn regime_order_monotone_in_gamma() {
        for j1 in [0.2, 0.5, 0.9, 1.0, 1.3] {
            let mut last = PtRegime::Unbroken;
            for g in linspace(0.0, 3.0, 601) {
                let r = classify(&open(6, j1, g)).pt_regime;
                assert!(r >= last, "J1={j1} γ={g}");
                last = r;
            }
        }
    }

    #[test]
    fn sweep_regimes_match_table() {
        let p = open(6, 0.5, 0.0);
        let ge = edge_ep_threshold(&p).unwrap().unwrap();
        let grid = vec![0.0, ge * 0.5, ge * 0.9, ge * 1.5, 0.1, 0.3, 0.49, 2.8];
        let s = sweep_spectrum(&p, &grid).unwrap();
        let counts = s.complex_counts(1e-6);
        assert_eq!(&counts[..3], &[0, 0, 0]);
        for &k in &counts[3..7] {
            assert_eq!(k, 2);
        }
        assert_eq!(counts[7], 12);
        for row in &s.eigenvalues {
            assert_eq!(row.len(), 12);
            for e in row {
                assert!(row.iter().any(|f| (f - e.conj()).norm() < 1e-9));
            }
        }
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let p = open(4, 0.5, 0.0);
        assert!(matches!(
            sweep_spectrum(&p, &[0.2, 0.1]),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn bisection_examples() {
        let p = open(6, 0.5, 0.0);
        let ge = edge_ep_threshold(&p).unwrap().unwrap();
        let num = detect_breaking_threshold(&p).unwrap();
        assert!((num - ge).abs() < 1e-4, "{num} vs {ge}");
        let n10 = detect_breaking_threshold(&open(10, 0.5, 0.0)).unwrap();
        assert!(n10 < num);
        // open trivial chains break at their smallest level, which only
        // approaches |J1 - J2| = 0.5 as N grows
        let triv = detect_breaking_threshold(&open(6, 1.5, 0.0)).unwrap();
        assert!((triv - 0.671_473_498_855_970_9).abs() < 2e-6, "{triv}");
        let triv50 = detect_breaking_threshold(&open(50, 1.5, 0.0)).unwrap();
        assert!((triv50 - 0.5).abs() < 1e-2, "{triv50}");
    }

    #[test]
    fn numerical_edge_point_is_smallest_hermitian_level() {
        // {Γ, H_SSH} = 0 gives H_PT² = H_SSH² − γ², so breaking starts at min |ε|.
        let p = open(4, 0.7, 0.0);
        let es = crate::matrixcore::eig_hermitian(&crate::hamiltonian::build_ssh(&p)).unwrap();
        let emin = es
            .real_values()
            .iter()
            .map(|e| e.abs())
            .fold(f64::INFINITY, f64::min);
        let num = detect_breaking_threshold(&p).unwrap();
        assert!((num - emin).abs() < 2e-6, "{num} vs {emin}");
    }

    #[test]
    fn periodic_breaking_at_inner_bulk_point() {
        let p = open(6, 0.5, 0.0).with_boundary(Boundary::Periodic);
        let t = detect_breaking_threshold(&p).unwrap();
        assert!((t - 0.5).abs() < 1e-3, "{t}");
    }

    #[test]
    fn diagram_region_counts() {
        let p = LatticeParams::default();
        let d = phase_diagram(&linspace(0.0, 2.0, 41), &linspace(0.0, 3.0, 61), &p).unwrap();
        assert_eq!(d.regimes_for(Topology::Topological).len(), 4);
        assert_eq!(d.regimes_for(Topology::Trivial).len(), 3);
        assert_eq!(d.boundaries[0].edge, Some(0.0));
        let l = classify(&open(6, 0.9, 1e-6));
        assert_eq!(l.pt_regime, PtRegime::Unbroken);
    }
}
