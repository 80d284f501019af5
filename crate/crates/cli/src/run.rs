use std::path::{Path, PathBuf};

use ptssh_core::dynamics::{evolve_battery, Battery, ChargingTrace};
use ptssh_core::hamiltonian::LatticeParams;
use ptssh_core::metrics::{
    asymptote_for, metrics_from_trace, size_scaling, sweep_metrics, ChargingMetrics, MetricMap,
    ScalingPoint, TimeSpec,
};
use ptssh_core::spectral::{phase_diagram, sweep_spectrum, PhaseDiagram, PtRegime, SpectralSweep};
use ptssh_core::verify::{verify_suite, Check, SuiteConfig};
use serde::Serialize;

use crate::args::{Command, Format, RunConfig};
use crate::error::CliResult;
use crate::svg::{heatmap, line_plot, Heatmap, LinePanel, Series};
use crate::table::{format_number, output_path, write_text, Table};

/// J₁ of the topological reference chain.
pub const J1_TOPOLOGICAL: f64 = 0.5;
/// J₁ of the trivial reference chain.
pub const J1_TRIVIAL: f64 = 1.5;
/// Reference gain/loss strengths of the presets.
pub const REFERENCE_GAMMAS: [f64; 4] = [0.01, 0.45, 1.0, 2.8];
pub const REFERENCE_N: usize = 6;
/// Populations below this maximum are left out of population plots.
const PLOT_POPULATION_MIN: f64 = 1e-3;

const REGIMES: [PtRegime; 4] = [
    PtRegime::Unbroken,
    PtRegime::EdgeBroken,
    PtRegime::PartiallyBroken,
    PtRegime::FullyBroken,
];

/// Collects written paths and the formats requested for them.
struct Sink<'a> {
    cfg: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl<'a> Sink<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        Self {
            cfg,
            written: Vec::new(),
        }
    }

    fn path(&mut self, name: &str) -> CliResult<PathBuf> {
        let p = output_path(&self.cfg.output, name)?;
        self.written.push(p.clone());
        Ok(p)
    }

    fn csv(&mut self, name: &str, table: impl FnOnce() -> Table) -> CliResult<()> {
        if self.cfg.wants(Format::Csv) {
            let p = self.path(name)?;
            table().write(&p)?;
        }
        Ok(())
    }

    fn json<S: Serialize>(&mut self, name: &str, value: impl FnOnce() -> S) -> CliResult<()> {
        if self.cfg.wants(Format::Json) {
            let p = self.path(name)?;
            write_json(&p, &value())?;
        }
        Ok(())
    }

    fn svg(&mut self, name: &str, render: impl FnOnce() -> CliResult<String>) -> CliResult<()> {
        if self.cfg.wants(Format::Svg) {
            let text = render()?;
            let p = self.path(name)?;
            write_text(&p, &text)?;
        }
        Ok(())
    }
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// Executes one validated configuration and returns the files written.
pub fn run(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let mut sink = Sink::new(cfg);
    match &cfg.command {
        Command::Spectrum { params, gammas } => {
            let sweep = sweep_spectrum(params, gammas)?;
            emit_spectrum(&mut sink, "spectrum", &sweep)?;
        }
        Command::PhaseDiagram {
            params,
            j1s,
            gammas,
        } => {
            let diagram = phase_diagram(j1s, gammas, params)?;
            emit_phase_diagram(&mut sink, &diagram)?;
        }
        Command::Charge { params, time } => {
            let (trace, metrics) = charge(params, time)?;
            sink.csv("trace.csv", || trace_table(&trace))?;
            sink.json("charge.json", || ChargeSummary {
                params: *params,
                metrics,
            })?;
            sink.svg("trace.svg", || {
                line_plot(&[
                    energy_panel("Stored energy", vec![energy_series("ΔE", &trace)]),
                    population_panel(&trace),
                ])
            })?;
        }
        Command::MetricsSweep {
            params,
            time,
            j1s,
            gammas,
        } => {
            let map = sweep_metrics(j1s, gammas, params, time)?;
            warn_failed_cells(&map);
            emit_metric_map(&mut sink, &map)?;
        }
        Command::Scaling {
            params,
            time,
            ns,
            gammas,
            j1_topo,
            j1_triv,
        } => {
            let points = size_scaling(ns, gammas, *j1_topo, *j1_triv, params, time)?;
            emit_scaling(&mut sink, &points)?;
        }
        Command::Populations { params, time } => {
            let (trace, _) = charge(params, time)?;
            sink.csv("populations.csv", || population_table(&trace))?;
            sink.svg("populations.svg", || line_plot(&[population_panel(&trace)]))?;
        }
        Command::Verify { n, time } => {
            let mut suite = SuiteConfig::for_size(*n);
            suite.time = *time;
            let checks = verify_suite(&suite)?;
            report_checks(&checks);
            let p = sink.path("verify.json")?;
            write_json(&p, &checks)?;
        }
        Command::Fig2 => fig2(&mut sink)?,
        Command::Fig3 { time } => fig3(&mut sink, time)?,
        Command::Fig4 { time, steps } => fig4(&mut sink, time, *steps)?,
        Command::Fig5 { time } => fig5(&mut sink, time)?,
    }
    Ok(sink.written)
}

#[derive(Serialize)]
struct ChargeSummary {
    params: LatticeParams<f64>,
    metrics: ChargingMetrics<f64>,
}

/// Charging trace and its indicators.
pub fn charge(
    params: &LatticeParams<f64>,
    time: &TimeSpec<f64>,
) -> CliResult<(ChargingTrace<f64>, ChargingMetrics<f64>)> {
    let b = Battery::new(*params)?;
    let trace = evolve_battery(&b, time.t_max_for(params), time.dt)?;
    let metrics = metrics_from_trace(&trace, asymptote_for(&b)?)?;
    Ok((trace, metrics))
}

fn report_checks(checks: &[Check]) {
    for c in checks {
        println!(
            "{} {} observed={} bound={}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            format_number(c.observed),
            format_number(c.bound)
        );
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    println!("{passed}/{} checks passed", checks.len());
}

fn warn_failed_cells(map: &MetricMap<f64>) {
    for (i, row) in map.cells.iter().enumerate() {
        for (k, cell) in row.iter().enumerate() {
            if let Err(e) = cell {
                eprintln!(
                    "warning: J1={} gamma={}: {}: {e}",
                    format_number(map.j1_grid[i]),
                    format_number(map.gamma_grid[k]),
                    e.name()
                );
            }
        }
    }
}

fn numbered(prefix: &str, count: usize) -> impl Iterator<Item = String> + '_ {
    (1..=count).map(move |j| format!("{prefix}_{j}"))
}

/// `t,delta_e,p_1..p_2N`.
pub fn trace_table(trace: &ChargingTrace<f64>) -> Table {
    let dim = trace.params.dim();
    let header: Vec<String> = ["t".to_string(), "delta_e".to_string()]
        .into_iter()
        .chain(numbered("p", dim))
        .collect();
    let mut t = Table::new(&header);
    for k in 0..trace.len() {
        let mut row = vec![trace.times[k], trace.delta_e[k]];
        row.extend_from_slice(&trace.populations[k]);
        t.push_numbers(&row);
    }
    t
}

/// `t,p_1..p_2N`.
pub fn population_table(trace: &ChargingTrace<f64>) -> Table {
    let dim = trace.params.dim();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(numbered("p", dim))
        .collect();
    let mut t = Table::new(&header);
    for k in 0..trace.len() {
        let mut row = vec![trace.times[k]];
        row.extend_from_slice(&trace.populations[k]);
        t.push_numbers(&row);
    }
    t
}

/// `gamma,re_e_1..re_e_2N,im_e_1..im_e_2N`.
pub fn spectrum_table(sweep: &SpectralSweep<f64>) -> Table {
    let dim = sweep.eigenvalues.first().map_or(0, Vec::len);
    let header: Vec<String> = std::iter::once("gamma".to_string())
        .chain(numbered("re_e", dim))
        .chain(numbered("im_e", dim))
        .collect();
    let mut t = Table::new(&header);
    for (g, row) in sweep.gamma_grid.iter().zip(&sweep.eigenvalues) {
        let mut values = vec![*g];
        values.extend(row.iter().map(|e| e.re));
        values.extend(row.iter().map(|e| e.im));
        t.push_numbers(&values);
    }
    t
}

/// `j1,gamma,topology,regime`, J₁ major.
pub fn labels_table(d: &PhaseDiagram<f64>) -> Table {
    let mut t = Table::new(&["j1", "gamma", "topology", "regime"]);
    for (i, j1) in d.j1_grid.iter().enumerate() {
        for (k, g) in d.gamma_grid.iter().enumerate() {
            let l = d.labels[i][k];
            t.push(vec![
                format_number(*j1),
                format_number(*g),
                l.topology.label().to_string(),
                l.pt_regime.label().to_string(),
            ]);
        }
    }
    t
}

/// `j1,gamma_e,gamma_inner,gamma_outer`; `gamma_e` is empty without edge states.
pub fn boundaries_table(d: &PhaseDiagram<f64>) -> Table {
    let mut t = Table::new(&["j1", "gamma_e", "gamma_inner", "gamma_outer"]);
    for b in &d.boundaries {
        t.push(vec![
            format_number(b.j1),
            b.edge.map(format_number).unwrap_or_default(),
            format_number(b.inner),
            format_number(b.outer),
        ]);
    }
    t
}

/// `j1,gamma,first_peak,log10_t95`, J₁ major; failed cells are `nan`.
pub fn metrics_table(map: &MetricMap<f64>) -> Table {
    let fp = map.first_peak_grid();
    let lt = map.log10_t95_grid();
    let mut t = Table::new(&["j1", "gamma", "first_peak", "log10_t95"]);
    for (i, j1) in map.j1_grid.iter().enumerate() {
        for (k, g) in map.gamma_grid.iter().enumerate() {
            t.push_numbers(&[*j1, *g, fp[i][k], lt[i][k]]);
        }
    }
    t
}

/// `n,gamma,phase,first_peak,log10_t95`.
pub fn scaling_table(points: &[ScalingPoint<f64>]) -> Table {
    let mut t = Table::new(&["n", "gamma", "phase", "first_peak", "log10_t95"]);
    for p in points {
        let (fp, lt) = match &p.metrics {
            Ok(m) => (m.first_peak, m.saturation_time.log10()),
            Err(_) => (f64::NAN, f64::NAN),
        };
        t.push(vec![
            p.n.to_string(),
            format_number(p.gamma),
            p.phase.label().to_string(),
            format_number(fp),
            format_number(lt),
        ]);
    }
    t
}

#[derive(Serialize)]
struct EigenRow {
    gamma: f64,
    re: Vec<f64>,
    im: Vec<f64>,
    near_exceptional: bool,
}

fn emit_spectrum(sink: &mut Sink, stem: &str, sweep: &SpectralSweep<f64>) -> CliResult<()> {
    sink.csv(&format!("{stem}.csv"), || spectrum_table(sweep))?;
    sink.json(&format!("{stem}.json"), || {
        sweep
            .gamma_grid
            .iter()
            .zip(&sweep.eigenvalues)
            .zip(&sweep.ep_flags)
            .map(|((g, row), flag)| EigenRow {
                gamma: *g,
                re: row.iter().map(|e| e.re).collect(),
                im: row.iter().map(|e| e.im).collect(),
                near_exceptional: *flag,
            })
            .collect::<Vec<_>>()
    })?;
    sink.svg(&format!("{stem}.svg"), || {
        let dim = sweep.eigenvalues.first().map_or(0, Vec::len);
        let curves = |part: fn(&num_complex::Complex64) -> f64| -> Vec<Series> {
            (0..dim)
                .map(|j| {
                    Series::new(
                        format!("E_{}", j + 1),
                        sweep.gamma_grid.clone(),
                        sweep.eigenvalues.iter().map(|row| part(&row[j])).collect(),
                    )
                })
                .collect()
        };
        line_plot(&[
            LinePanel {
                title: "Real part of the eigenvalues".into(),
                x_label: "γ/J₂".into(),
                y_label: "Re E / J₂".into(),
                series: curves(|e| e.re),
            },
            LinePanel {
                title: "Imaginary part of the eigenvalues".into(),
                x_label: "γ/J₂".into(),
                y_label: "Im E / J₂".into(),
                series: curves(|e| e.im),
            },
        ])
    })
}

#[derive(Serialize)]
struct DiagramSummary<'a> {
    topological: Vec<&'static str>,
    trivial: Vec<&'static str>,
    boundaries: &'a [ptssh_core::spectral::BoundaryPoint<f64>],
}

fn emit_phase_diagram(sink: &mut Sink, d: &PhaseDiagram<f64>) -> CliResult<()> {
    use ptssh_core::spectral::Topology;
    sink.csv("labels.csv", || labels_table(d))?;
    sink.csv("boundaries.csv", || boundaries_table(d))?;
    sink.json("phase_diagram.json", || DiagramSummary {
        topological: d
            .regimes_for(Topology::Topological)
            .iter()
            .map(|r| r.label())
            .collect(),
        trivial: d
            .regimes_for(Topology::Trivial)
            .iter()
            .map(|r| r.label())
            .collect(),
        boundaries: &d.boundaries,
    })?;
    sink.svg("phase_diagram.svg", || {
        let values = d
            .labels
            .iter()
            .map(|col| {
                col.iter()
                    .map(|l| REGIMES.iter().position(|r| *r == l.pt_regime).unwrap_or(0) as f64)
                    .collect()
            })
            .collect();
        heatmap(&[Heatmap {
            title: "PT regime".into(),
            x_label: "J₁/J₂".into(),
            y_label: "γ/J₂".into(),
            xs: d.j1_grid.clone(),
            ys: d.gamma_grid.clone(),
            values,
            categories: Some(REGIMES.iter().map(|r| r.label().to_string()).collect()),
        }])
    })
}

#[derive(Serialize)]
struct CellSummary {
    j1: f64,
    gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<ChargingMetrics<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'static str>,
}

fn emit_metric_map(sink: &mut Sink, map: &MetricMap<f64>) -> CliResult<()> {
    sink.csv("metrics.csv", || metrics_table(map))?;
    sink.json("metrics.json", || {
        let mut cells = Vec::new();
        for (i, row) in map.cells.iter().enumerate() {
            for (k, cell) in row.iter().enumerate() {
                cells.push(CellSummary {
                    j1: map.j1_grid[i],
                    gamma: map.gamma_grid[k],
                    metrics: cell.as_ref().ok().copied(),
                    error: cell.as_ref().err().map(|e| e.name()),
                });
            }
        }
        cells
    })?;
    sink.svg("metrics.svg", || {
        let map_of = |title: &str, values| Heatmap {
            title: title.into(),
            x_label: "J₁/J₂".into(),
            y_label: "γ/J₂".into(),
            xs: map.j1_grid.clone(),
            ys: map.gamma_grid.clone(),
            values,
            categories: None,
        };
        heatmap(&[
            map_of("First-peak amplitude ΔE", map.first_peak_grid()),
            map_of("log₁₀ t₀.₉₅", map.log10_t95_grid()),
        ])
    })
}

#[derive(Serialize)]
struct ScalingSummary {
    n: usize,
    gamma: f64,
    phase: &'static str,
    j1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<ChargingMetrics<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'static str>,
}

fn emit_scaling(sink: &mut Sink, points: &[ScalingPoint<f64>]) -> CliResult<()> {
    sink.csv("scaling.csv", || scaling_table(points))?;
    sink.json("scaling.json", || {
        points
            .iter()
            .map(|p| ScalingSummary {
                n: p.n,
                gamma: p.gamma,
                phase: p.phase.label(),
                j1: p.j1,
                metrics: p.metrics.as_ref().ok().copied(),
                error: p.metrics.as_ref().err().map(|e| e.name()),
            })
            .collect::<Vec<_>>()
    })?;
    sink.svg("scaling.svg", || {
        let mut keys: Vec<(f64, &'static str)> = Vec::new();
        for p in points {
            let key = (p.gamma, p.phase.label());
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let curves = |f: &dyn Fn(&ChargingMetrics<f64>) -> f64| -> Vec<Series> {
            keys.iter()
                .map(|(g, phase)| {
                    let sel: Vec<&ScalingPoint<f64>> = points
                        .iter()
                        .filter(|p| p.gamma == *g && p.phase.label() == *phase)
                        .collect();
                    Series::new(
                        format!("{phase}, γ={}", format_number(*g)),
                        sel.iter().map(|p| p.n as f64).collect(),
                        sel.iter()
                            .map(|p| p.metrics.as_ref().map(f).unwrap_or(f64::NAN))
                            .collect(),
                    )
                })
                .collect()
        };
        line_plot(&[
            LinePanel {
                title: "First-peak amplitude".into(),
                x_label: "N".into(),
                y_label: "ΔE".into(),
                series: curves(&|m| m.first_peak),
            },
            LinePanel {
                title: "Saturation time".into(),
                x_label: "N".into(),
                y_label: "log₁₀ t₀.₉₅".into(),
                series: curves(&|m| m.saturation_time.log10()),
            },
        ])
    })
}

fn energy_series(label: &str, trace: &ChargingTrace<f64>) -> Series {
    Series::new(label, trace.times.clone(), trace.delta_e.clone())
}

fn energy_panel(title: &str, series: Vec<Series>) -> LinePanel {
    LinePanel {
        title: title.into(),
        x_label: "t·J₂".into(),
        y_label: "ΔE".into(),
        series,
    }
}

fn population_panel(trace: &ChargingTrace<f64>) -> LinePanel {
    let series = (0..trace.params.dim())
        .filter_map(|j| {
            let s = trace.population_series(j);
            let peak = s.iter().copied().fold(0.0, f64::max);
            (peak >= PLOT_POPULATION_MIN)
                .then(|| Series::new(format!("P_{}", j + 1), trace.times.clone(), s))
        })
        .collect();
    LinePanel {
        title: format!(
            "Eigenbasis populations, J₁/J₂={}, γ/J₂={}",
            format_number(trace.params.ratio()),
            format_number(trace.params.gamma())
        ),
        x_label: "t·J₂".into(),
        y_label: "P_j".into(),
        series,
    }
}

fn reference(j1: f64, gamma: f64) -> CliResult<LatticeParams<f64>> {
    Ok(LatticeParams::open(REFERENCE_N, j1, gamma)?)
}

const PHASES: [(&str, f64); 2] = [("topological", J1_TOPOLOGICAL), ("trivial", J1_TRIVIAL)];

fn fig2(sink: &mut Sink) -> CliResult<()> {
    let gammas = ptssh_core::grid::linspace(0.0, 3.0, 301);
    for (name, j1) in PHASES {
        let sweep = sweep_spectrum(&reference(j1, 0.0)?, &gammas)?;
        emit_spectrum(sink, &format!("spectrum_{name}"), &sweep)?;
    }
    let j1s = ptssh_core::grid::linspace(0.0, 2.0, 201);
    let gs = ptssh_core::grid::linspace(0.0, 3.0, 201);
    let d = phase_diagram(&j1s, &gs, &reference(J1_TOPOLOGICAL, 0.0)?)?;
    emit_phase_diagram(sink, &d)
}

type Run = (&'static str, f64, ChargingTrace<f64>, ChargingMetrics<f64>);

fn reference_runs(time: &TimeSpec<f64>) -> CliResult<Vec<Run>> {
    use rayon::prelude::*;
    let jobs: Vec<(&'static str, f64, f64)> = REFERENCE_GAMMAS
        .iter()
        .flat_map(|&g| PHASES.iter().map(move |&(name, j1)| (name, j1, g)))
        .collect();
    jobs.par_iter()
        .map(|&(name, j1, g)| {
            let (trace, m) = charge(&reference(j1, g)?, time)?;
            Ok((name, g, trace, m))
        })
        .collect()
}

fn fig3(sink: &mut Sink, time: &TimeSpec<f64>) -> CliResult<()> {
    let runs = reference_runs(time)?;
    for (name, g, trace, _) in &runs {
        sink.csv(
            &format!("trace_{name}_gamma_{}.csv", format_number(*g)),
            || trace_table(trace),
        )?;
    }
    sink.csv("fig3_metrics.csv", || {
        let mut t = Table::new(&["phase", "gamma", "first_peak", "log10_t95"]);
        for (name, g, _, m) in &runs {
            t.push(vec![
                name.to_string(),
                format_number(*g),
                format_number(m.first_peak),
                format_number(m.saturation_time.log10()),
            ]);
        }
        t
    })?;
    sink.svg("fig3.svg", || {
        let panels: Vec<LinePanel> = REFERENCE_GAMMAS
            .iter()
            .map(|&g| {
                let series = runs
                    .iter()
                    .filter(|r| r.1 == g)
                    .map(|(name, _, trace, _)| energy_series(name, trace))
                    .collect();
                energy_panel(&format!("γ/J₂ = {}", format_number(g)), series)
            })
            .collect();
        line_plot(&panels)
    })
}

fn fig4(sink: &mut Sink, time: &TimeSpec<f64>, steps: usize) -> CliResult<()> {
    let j1s = ptssh_core::grid::linspace(0.1, 2.0, steps);
    let gs = ptssh_core::grid::linspace(0.05, 3.0, steps);
    let map = sweep_metrics(&j1s, &gs, &reference(J1_TOPOLOGICAL, 0.0)?, time)?;
    warn_failed_cells(&map);
    emit_metric_map(sink, &map)?;
    let points = size_scaling(
        &[4, 6, 8, 10],
        &[0.45, 1.0, 2.8],
        J1_TOPOLOGICAL,
        J1_TRIVIAL,
        &reference(J1_TOPOLOGICAL, 0.0)?,
        time,
    )?;
    emit_scaling(sink, &points)
}

fn fig5(sink: &mut Sink, time: &TimeSpec<f64>) -> CliResult<()> {
    let runs = reference_runs(time)?;
    for (name, g, trace, _) in &runs {
        sink.csv(
            &format!("populations_{name}_gamma_{}.csv", format_number(*g)),
            || population_table(trace),
        )?;
    }
    sink.svg("fig5.svg", || {
        line_plot(
            &runs
                .iter()
                .map(|(_, _, trace, _)| population_panel(trace))
                .collect::<Vec<_>>(),
        )
    })
}
