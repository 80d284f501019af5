//! Self-contained SVG line plots and heatmaps.
//!
//! Output depends only on the data, so identical inputs give identical bytes.

use std::fmt::Write as _;

use crate::error::{CliError, CliResult};

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 50.0;
/// Half-width added around a range whose ends coincide.
const DEGENERATE_PAD: f64 = 0.1;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
/// Colour of cells whose value is not finite.
const MISSING: &str = "#d9d9d9";

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            xs,
            ys,
        }
    }

    fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

/// One set of axes holding several curves.
#[derive(Clone, Debug, PartialEq)]
pub struct LinePanel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Values on a regular grid, `values[i][k]` at `(xs[i], ys[k])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// Names of integer-valued categories; when set the legend lists them
    /// instead of a colour bar.
    pub categories: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        let mut r: Option<Range> = None;
        for v in values.filter(|v| v.is_finite()) {
            r = Some(match r {
                None => Range { lo: v, hi: v },
                Some(r) => Range {
                    lo: r.lo.min(v),
                    hi: r.hi.max(v),
                },
            });
        }
        r.map(Range::padded)
    }

    fn padded(self) -> Self {
        if self.hi > self.lo {
            self
        } else {
            Range {
                lo: self.lo - DEGENERATE_PAD,
                hi: self.hi + DEGENERATE_PAD,
            }
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#
    );
}

/// Frame, ticks, title and axis labels of one panel whose top-left corner
/// sits at `(0, top)`.
fn axes(out: &mut String, top: f64, title: &str, xl: &str, yl: &str, x: Range, y: Range) {
    let (x0, x1) = (MARGIN_L, PANEL_W - MARGIN_R);
    let (y0, y1) = (top + MARGIN_T, top + PANEL_H - MARGIN_B);
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    for k in 0..TICKS {
        let f = k as f64 / (TICKS - 1) as f64;
        let px = x0 + f * (x1 - x0);
        let py = y1 - f * (y1 - y0);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{y1:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y1 + 5.0,
            y1 + 18.0,
            tick_label(x.lo + f * (x.hi - x.lo))
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            tick_label(y.lo + f * (y.hi - y.lo))
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        (x0 + x1) / 2.0,
        top + 22.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        y1 + 38.0,
        escape(xl)
    );
    let cy = (y0 + y1) / 2.0;
    let _ = writeln!(
        out,
        r#"<text x="18" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 18 {cy:.2})">{}</text>"#,
        escape(yl)
    );
}

/// Stacks the panels vertically. Fails with `EmptySeries` when there is no
/// finite point to draw at all.
pub fn line_plot(panels: &[LinePanel]) -> CliResult<String> {
    let any_point = panels
        .iter()
        .flat_map(|p| &p.series)
        .flat_map(|s| s.points())
        .any(|(x, y)| x.is_finite() && y.is_finite());
    if !any_point {
        return Err(CliError::EmptySeries);
    }
    let mut out = String::new();
    header(&mut out, PANEL_W, PANEL_H * panels.len() as f64);
    for (k, panel) in panels.iter().enumerate() {
        let top = k as f64 * PANEL_H;
        let finite = || {
            panel
                .series
                .iter()
                .flat_map(|s| s.points())
                .filter(|(x, y)| x.is_finite() && y.is_finite())
        };
        let fallback = Range { lo: 0.0, hi: 0.0 }.padded();
        let xr = Range::of(finite().map(|p| p.0)).unwrap_or(fallback);
        let yr = Range::of(finite().map(|p| p.1)).unwrap_or(fallback);
        axes(
            &mut out,
            top,
            &panel.title,
            &panel.x_label,
            &panel.y_label,
            xr,
            yr,
        );
        let (x0, x1) = (MARGIN_L, PANEL_W - MARGIN_R);
        let (y0, y1) = (top + MARGIN_T, top + PANEL_H - MARGIN_B);
        for (j, s) in panel.series.iter().enumerate() {
            let colour = PALETTE[j % PALETTE.len()];
            // non-finite samples split the curve
            let mut segment: Vec<String> = Vec::new();
            let flush = |segment: &mut Vec<String>, out: &mut String| {
                if segment.len() > 1 {
                    let _ = writeln!(
                        out,
                        r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                        segment.join(" ")
                    );
                } else if let Some(p) = segment.first() {
                    let (cx, cy) = p.split_once(',').unwrap_or(("0", "0"));
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{cx}" cy="{cy}" r="2" fill="{colour}"/>"#
                    );
                }
                segment.clear();
            };
            for (x, y) in s.points() {
                if x.is_finite() && y.is_finite() {
                    let px = x0 + xr.frac(x) * (x1 - x0);
                    let py = y1 - yr.frac(y) * (y1 - y0);
                    segment.push(format!("{px:.2},{py:.2}"));
                } else {
                    flush(&mut segment, &mut out);
                }
            }
            flush(&mut segment, &mut out);
            let ly = y0 + 14.0 + 16.0 * j as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                x1 + 10.0,
                x1 + 30.0,
                x1 + 35.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Piecewise-linear blue to yellow colour ramp on `[0, 1]`.
fn ramp(f: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let f = f.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let k = (f.floor() as usize).min(STOPS.len() - 2);
    let t = f - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |u: f64, v: f64| (u + t * (v - u)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

/// Cell edges for grid centres: midpoints, extended by half a spacing at the ends.
fn edges(c: &[f64]) -> Vec<f64> {
    if c.len() == 1 {
        return vec![c[0] - DEGENERATE_PAD, c[0] + DEGENERATE_PAD];
    }
    let mut e = Vec::with_capacity(c.len() + 1);
    e.push(c[0] - (c[1] - c[0]) / 2.0);
    for w in c.windows(2) {
        e.push((w[0] + w[1]) / 2.0);
    }
    e.push(c[c.len() - 1] + (c[c.len() - 1] - c[c.len() - 2]) / 2.0);
    e
}

pub fn heatmap(maps: &[Heatmap]) -> CliResult<String> {
    if maps.is_empty() || maps.iter().any(|m| m.xs.is_empty() || m.ys.is_empty()) {
        return Err(CliError::EmptySeries);
    }
    let mut out = String::new();
    header(&mut out, PANEL_W, PANEL_H * maps.len() as f64);
    for (k, map) in maps.iter().enumerate() {
        let top = k as f64 * PANEL_H;
        let xe = edges(&map.xs);
        let ye = edges(&map.ys);
        let xr = Range {
            lo: xe[0],
            hi: xe[xe.len() - 1],
        };
        let yr = Range {
            lo: ye[0],
            hi: ye[ye.len() - 1],
        };
        let vr = Range::of(map.values.iter().flatten().copied())
            .unwrap_or(Range { lo: 0.0, hi: 0.0 }.padded());
        let (x0, x1) = (MARGIN_L, PANEL_W - MARGIN_R);
        let (y0, y1) = (top + MARGIN_T, top + PANEL_H - MARGIN_B);
        let colour_of = |v: f64| -> String {
            if !v.is_finite() {
                return MISSING.to_string();
            }
            match &map.categories {
                Some(names) if names.len() > 1 => {
                    let last = (names.len() - 1) as f64;
                    ramp(v / last)
                }
                Some(_) => ramp(0.0),
                None => ramp(vr.frac(v)),
            }
        };
        for (i, row) in map.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let (xa, xb) = (xr.frac(xe[i]), xr.frac(xe[i + 1]));
                let (ya, yb) = (yr.frac(ye[j]), yr.frac(ye[j + 1]));
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    x0 + xa * (x1 - x0),
                    y1 - yb * (y1 - y0),
                    (xb - xa) * (x1 - x0),
                    (yb - ya) * (y1 - y0),
                    colour_of(v)
                );
            }
        }
        axes(
            &mut out,
            top,
            &map.title,
            &map.x_label,
            &map.y_label,
            xr,
            yr,
        );
        let legend: Vec<(String, String)> = match &map.categories {
            Some(names) => names
                .iter()
                .enumerate()
                .map(|(c, name)| (colour_of(c as f64), name.clone()))
                .collect(),
            None => (0..TICKS)
                .map(|t| {
                    let f = t as f64 / (TICKS - 1) as f64;
                    (ramp(f), tick_label(vr.lo + f * (vr.hi - vr.lo)))
                })
                .chain(std::iter::once((
                    MISSING.to_string(),
                    "inf / n.a.".to_string(),
                )))
                .collect(),
        };
        for (j, (colour, label)) in legend.iter().enumerate() {
            let ly = y0 + 16.0 * j as f64;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{ly:.2}" width="12" height="12" fill="{colour}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                x1 + 10.0,
                x1 + 28.0,
                ly + 10.0,
                escape(label)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
