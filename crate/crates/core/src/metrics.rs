//! Charging-performance indicators: the first-peak amplitude and the
//! saturation time, together with the γ–J₁ and system-size sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    asymptotic_delta_e, asymptotic_state, default_t_max, evolve_battery, Battery, ChargingTrace,
    DEFAULT_DT,
};
use crate::error::{Error, Result};
use crate::grid::check_increasing;
use crate::hamiltonian::LatticeParams;
use crate::matrixcore::CMatrix;
use crate::scalar::Real;
use crate::spectral::Topology;

/// Traces with `max |ΔE|` at or below this are treated as flat (uncharged).
pub const FLAT_TOL: f64 = 1e-10;
/// Rise and fall needed to confirm a peak, relative to `max |ΔE|`.
pub const PEAK_MARGIN: f64 = 1e-6;
/// Fraction of the asymptote that defines saturation.
pub const SATURATION_LEVEL: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PeakKind {
    /// A genuine interior maximum.
    Peak,
    /// No maximum; the unity convention applies.
    Monotonic,
    /// No charging at all; scored 0.
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstPeak<T: Real> {
    pub value: T,
    pub kind: PeakKind,
    /// Index of the peak sample, when there is one.
    pub index: Option<usize>,
}

/// First-peak amplitude of a `ΔE` series.
///
/// The series must rise by more than the margin above its running minimum,
/// reach a maximum, then fall by more than the margin below it; the value at
/// that maximum is returned. A series that never does so is monotonic and
/// scores 1, unless it never charged, in which case it scores 0.
pub fn first_peak_of<T: Real>(delta_e: &[T]) -> Result<FirstPeak<T>> {
    if delta_e.len() < 3 {
        return Err(Error::TraceTooShort {
            len: delta_e.len(),
            min: 3,
        });
    }
    let scale = delta_e.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if scale <= T::lit(FLAT_TOL) {
        return Ok(FirstPeak {
            value: T::zero(),
            kind: PeakKind::Flat,
            index: None,
        });
    }
    let margin = scale * T::lit(PEAK_MARGIN);
    let mut trough = delta_e[0];
    let mut candidate: Option<(usize, T)> = None;
    for (i, &x) in delta_e.iter().enumerate().skip(1) {
        match candidate {
            None => {
                if x > trough + margin {
                    candidate = Some((i, x));
                } else {
                    trough = trough.min(x);
                }
            }
            Some((_, top)) if x > top => candidate = Some((i, x)),
            Some((j, top)) if x < top - margin => {
                return Ok(FirstPeak {
                    value: top,
                    kind: PeakKind::Peak,
                    index: Some(j),
                });
            }
            Some(_) => {}
        }
    }
    Ok(FirstPeak {
        value: T::one(),
        kind: PeakKind::Monotonic,
        index: None,
    })
}

pub fn first_peak<T: Real>(trace: &ChargingTrace<T>) -> Result<FirstPeak<T>> {
    first_peak_of(&trace.delta_e)
}

/// Saturation time `t₀.₉₅`, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Saturation<T: Real> {
    Finite(T),
    Infinite,
}

impl<T: Real> Saturation<T> {
    /// The time, with `Infinite` mapped to `+∞`.
    pub fn value(self) -> T {
        match self {
            Saturation::Finite(t) => t,
            Saturation::Infinite => T::infinity(),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Saturation::Finite(_))
    }

    /// `log₁₀ t₀.₉₅`, `+∞` when infinite.
    pub fn log10(self) -> T {
        self.value().log10()
    }
}

/// Earliest time from which `ΔE` stays at or above 95% of `asymptote` until
/// the end of the series. `None` means the regime is unbroken.
pub fn saturation_time_of<T: Real>(
    times: &[T],
    delta_e: &[T],
    asymptote: Option<T>,
) -> Result<Saturation<T>> {
    let Some(a) = asymptote else {
        return Ok(Saturation::Infinite);
    };
    if !a.is_finite() {
        return Err(Error::MissingAsymptote);
    }
    if times.len() != delta_e.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: delta_e.len(),
        });
    }
    if times.is_empty() {
        return Err(Error::TraceTooShort { len: 0, min: 1 });
    }
    let level = a * T::lit(SATURATION_LEVEL);
    match delta_e.iter().rposition(|x| !(*x >= level)) {
        None => Ok(Saturation::Finite(times[0])),
        Some(k) if k + 1 == times.len() => Ok(Saturation::Infinite),
        Some(k) => Ok(Saturation::Finite(times[k + 1])),
    }
}

pub fn saturation_time<T: Real>(
    trace: &ChargingTrace<T>,
    asymptote: Option<T>,
) -> Result<Saturation<T>> {
    saturation_time_of(&trace.times, &trace.delta_e, asymptote)
}

/// Both indicators for one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChargingMetrics<T: Real> {
    pub first_peak: T,
    pub peak_kind: PeakKind,
    pub saturation_time: Saturation<T>,
    pub monotonic: bool,
    /// `ΔE_∞`, absent in the unbroken regime.
    pub asymptote: Option<T>,
}

/// Long-time stored energy, or `None` without a dominant mode.
pub fn asymptote_for<T: Real>(b: &Battery<T>) -> Result<Option<T>> {
    match asymptotic_delta_e(&b.h_pt, &b.h_norm, &b.psi0) {
        Ok(a) => Ok(Some(a)),
        Err(Error::NoDominantMode) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn metrics_from_trace<T: Real>(
    trace: &ChargingTrace<T>,
    asymptote: Option<T>,
) -> Result<ChargingMetrics<T>> {
    let peak = first_peak(trace)?;
    Ok(ChargingMetrics {
        first_peak: peak.value,
        peak_kind: peak.kind,
        saturation_time: saturation_time(trace, asymptote)?,
        monotonic: peak.kind == PeakKind::Monotonic,
        asymptote,
    })
}

/// Output-time settings for sweeps; `t_max = None` picks the regime default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSpec<T: Real> {
    pub t_max: Option<T>,
    pub dt: T,
}

impl<T: Real> Default for TimeSpec<T> {
    fn default() -> Self {
        Self {
            t_max: None,
            dt: T::lit(DEFAULT_DT),
        }
    }
}

impl<T: Real> TimeSpec<T> {
    pub fn t_max_for(&self, p: &LatticeParams<T>) -> T {
        self.t_max.unwrap_or_else(|| default_t_max(p))
    }
}

/// Simulates `p` and extracts both indicators.
pub fn charging_metrics<T: Real>(
    p: &LatticeParams<T>,
    time: &TimeSpec<T>,
) -> Result<ChargingMetrics<T>> {
    let b = Battery::new(*p)?;
    let trace = evolve_battery(&b, time.t_max_for(p), time.dt)?;
    metrics_from_trace(&trace, asymptote_for(&b)?)
}

/// Indicators over a J₁ × γ grid; `cells[i][k]` is at `(j1_grid[i], gamma_grid[k])`.
#[derive(Clone, Debug)]
pub struct MetricMap<T: Real> {
    pub j1_grid: Vec<T>,
    pub gamma_grid: Vec<T>,
    pub cells: Vec<Vec<Result<ChargingMetrics<T>>>>,
}

impl<T: Real> MetricMap<T> {
    /// First-peak amplitudes, NaN where the cell failed.
    pub fn first_peak_grid(&self) -> Vec<Vec<T>> {
        self.map_cells(|m| m.first_peak)
    }

    /// `log₁₀ t₀.₉₅`, `+∞` when infinite and NaN where the cell failed.
    pub fn log10_t95_grid(&self) -> Vec<Vec<T>> {
        self.map_cells(|m| m.saturation_time.log10())
    }

    fn map_cells(&self, f: impl Fn(&ChargingMetrics<T>) -> T) -> Vec<Vec<T>> {
        self.cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.as_ref().map(&f).unwrap_or(T::nan()))
                    .collect()
            })
            .collect()
    }
}

/// Runs [`charging_metrics`] on every grid cell concurrently. Failing cells
/// keep their error and do not stop the sweep.
pub fn sweep_metrics<T: Real>(
    j1_grid: &[T],
    gamma_grid: &[T],
    p_base: &LatticeParams<T>,
    time: &TimeSpec<T>,
) -> Result<MetricMap<T>> {
    check_increasing("J1", j1_grid)?;
    check_increasing("gamma", gamma_grid)?;
    let cells: Vec<(T, T)> = j1_grid
        .iter()
        .flat_map(|&j1| gamma_grid.iter().map(move |&g| (j1, g)))
        .collect();
    let mut flat: Vec<Result<ChargingMetrics<T>>> = cells
        .par_iter()
        .map(|&(j1, g)| {
            let p = p_base.with_j1(j1)?.with_gamma(g)?;
            charging_metrics(&p, time)
        })
        .collect();
    let mut rows = Vec::with_capacity(j1_grid.len());
    for _ in 0..j1_grid.len() {
        let rest = flat.split_off(gamma_grid.len());
        rows.push(std::mem::replace(&mut flat, rest));
    }
    Ok(MetricMap {
        j1_grid: j1_grid.to_vec(),
        gamma_grid: gamma_grid.to_vec(),
        cells: rows,
    })
}

/// One point of a size-scaling curve.
#[derive(Clone, Debug)]
pub struct ScalingPoint<T: Real> {
    pub n: usize,
    pub gamma: T,
    pub phase: Topology,
    pub j1: T,
    pub metrics: Result<ChargingMetrics<T>>,
}

/// Indicators for every `(N, γ, phase)` with the topological chain at
/// `j1_topo` and the trivial one at `j1_triv`. Points come back ordered by
/// γ, then phase (topological first), then N.
pub fn size_scaling<T: Real>(
    n_list: &[usize],
    gamma_list: &[T],
    j1_topo: T,
    j1_triv: T,
    p_base: &LatticeParams<T>,
    time: &TimeSpec<T>,
) -> Result<Vec<ScalingPoint<T>>> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(
            "N list must be non-empty and strictly increasing".into(),
        ));
    }
    check_increasing("gamma", gamma_list)?;
    let mut jobs = Vec::new();
    for &g in gamma_list {
        for (phase, j1) in [
            (Topology::Topological, j1_topo),
            (Topology::Trivial, j1_triv),
        ] {
            for &n in n_list {
                jobs.push((n, g, phase, j1));
            }
        }
    }
    Ok(jobs
        .par_iter()
        .map(|&(n, gamma, phase, j1)| {
            let metrics = p_base
                .with_n(n)
                .and_then(|p| p.with_j1(j1))
                .and_then(|p| p.with_gamma(gamma))
                .and_then(|p| charging_metrics(&p, time));
            ScalingPoint {
                n,
                gamma,
                phase,
                j1,
                metrics,
            }
        })
        .collect())
}

/// Relaxation time `1/Δλ` toward the dominant mode.
pub fn relaxation_estimate<T: Real>(h_pt: &CMatrix<T>) -> Result<T> {
    let s = asymptotic_state(h_pt)?;
    if s.degenerate_top {
        return Err(Error::DegenerateTop {
            gap: s.delta_lambda.as_f64(),
        });
    }
    Ok(s.delta_lambda.recip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve;
    use crate::hamiltonian::build_pt;
    use crate::scalar::c;

    fn open(n: usize, j1: f64, gamma: f64) -> LatticeParams<f64> {
        LatticeParams::open(n, j1, gamma).unwrap()
    }

    #[test]
    fn peak_detector_cases() {
        assert!(matches!(
            first_peak_of(&[0.0, 1.0]),
            Err(Error::TraceTooShort { .. })
        ));
        let flat = first_peak_of(&[0.0; 10]).unwrap();
        assert_eq!((flat.value, flat.kind), (0.0, PeakKind::Flat));
        let mono = first_peak_of(&[0.0, 0.1, 0.5, 0.9, 1.2]).unwrap();
        assert_eq!((mono.value, mono.kind), (1.0, PeakKind::Monotonic));
        let p = first_peak_of(&[0.0, 0.3, 0.6, 0.4, 0.9, 0.2]).unwrap();
        assert_eq!((p.value, p.kind, p.index), (0.6, PeakKind::Peak, Some(2)));
        // plateau top still counts as one peak
        let p = first_peak_of(&[0.0, 0.5, 0.5, 0.2]).unwrap();
        assert_eq!(p.value, 0.5);
        // ripple below the margin is ignored
        let p = first_peak_of(&[0.0, 0.5, 0.5 - 1e-9, 0.8, 1.0]).unwrap();
        assert_eq!(p.kind, PeakKind::Monotonic);
    }

    #[test]
    fn saturation_rules() {
        let t = [0.0, 1.0, 2.0, 3.0, 4.0];
        let de = [0.0, 0.97, 0.9, 0.96, 0.99];
        assert_eq!(
            saturation_time_of(&t, &de, Some(1.0)).unwrap(),
            Saturation::Finite(3.0)
        );
        assert_eq!(
            saturation_time_of(&t, &[1.0; 5], Some(1.0)).unwrap(),
            Saturation::Finite(0.0)
        );
        assert_eq!(
            saturation_time_of(&t, &[0.0, 0.5, 0.97, 0.5, 0.2], Some(1.0)).unwrap(),
            Saturation::Infinite
        );
        assert_eq!(
            saturation_time_of(&t, &de, None).unwrap(),
            Saturation::Infinite
        );
        assert_eq!(
            saturation_time_of(&t, &de, Some(f64::NAN)),
            Err(Error::MissingAsymptote)
        );
    }

    #[test]
    fn flat_trace_scores_zero() {
        let tr = evolve(&open(6, 0.5, 0.0), 10.0, 0.05).unwrap();
        let p = first_peak(&tr).unwrap();
        assert_eq!(p.kind, PeakKind::Flat);
        assert_eq!(p.value, 0.0);
    }

    #[test]
    fn regime_structure_at_six_cells() {
        let time = TimeSpec::default();
        let topo = charging_metrics(&open(6, 0.5, 0.45), &time).unwrap();
        let triv = charging_metrics(&open(6, 1.5, 0.45), &time).unwrap();
        assert!(topo.saturation_time.is_finite(), "{topo:?}");
        assert_eq!(triv.saturation_time, Saturation::Infinite);
        assert!(topo.first_peak > triv.first_peak);

        let topo = charging_metrics(&open(6, 0.5, 2.8), &time).unwrap();
        let triv = charging_metrics(&open(6, 1.5, 2.8), &time).unwrap();
        assert_eq!(topo.first_peak, 1.0);
        assert!(topo.monotonic && triv.monotonic);
        assert!(topo.saturation_time.value() < triv.saturation_time.value());
    }

    #[test]
    fn relaxation_examples() {
        let topo = relaxation_estimate(&build_pt(&open(6, 0.5, 2.8))).unwrap();
        let triv = relaxation_estimate(&build_pt(&open(6, 1.5, 2.8))).unwrap();
        assert!(triv < topo, "trivial gap should be larger");
        let degenerate = CMatrix::<f64>::from_diag(&[c(0.0, 1.0), c(0.0, 1.0)]);
        assert!(matches!(
            relaxation_estimate(&degenerate),
            Err(Error::DegenerateTop { .. })
        ));
        assert!(matches!(
            relaxation_estimate(&build_pt(&open(6, 0.5, 0.01))),
            Err(Error::NoDominantMode)
        ));
    }

    #[test]
    fn sweep_keeps_grid_order_and_errors() {
        let time = TimeSpec {
            t_max: Some(5.0),
            dt: 0.05,
        };
        let map = sweep_metrics(&[0.5, 1.5], &[0.0, 2.8], &open(4, 0.5, 0.0), &time).unwrap();
        assert_eq!(map.cells.len(), 2);
        assert_eq!(map.cells[0].len(), 2);
        let fp = map.first_peak_grid();
        assert_eq!(fp[0][0], 0.0);
        assert_eq!(fp[1][1], 1.0);
        assert!(map.log10_t95_grid()[0][0].is_infinite());

        let bad = TimeSpec {
            t_max: Some(1.0),
            dt: 2.0,
        };
        let map = sweep_metrics(&[0.5], &[0.1], &open(4, 0.5, 0.0), &bad).unwrap();
        assert!(matches!(map.cells[0][0], Err(Error::InvalidTime(_))));
        assert!(map.first_peak_grid()[0][0].is_nan());
    }
}
