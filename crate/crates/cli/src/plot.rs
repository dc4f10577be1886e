//! Static SVG charts. Each returns the document as a string; the bundle adds
//! the provenance comment.

use anyhow::{anyhow, Result};
use kyfan_core::Matrix;
use plotters::coord::ranged1d::{AsRangedCoord, ValueFormatter};
use plotters::prelude::*;

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), points }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Axes<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
}

fn bounds(vals: impl Iterator<Item = f64>, log: bool) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite() && (!log || *v > 0.0))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return if log { (0.1, 1.0) } else { (0.0, 1.0) };
    }
    if log {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo / 2.0, hi * 2.0) };
        (lo / 1.2, hi * 1.2)
    } else {
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5f64.max(0.05 * hi.abs()) };
        (lo - pad, hi + pad)
    }
}

/// Line chart with markers. Points that cannot be drawn on a log axis are
/// dropped.
pub fn line_chart(axes: Axes, series: &[Series]) -> Result<String> {
    let keep = |&(x, y): &(f64, f64)| {
        x.is_finite() && y.is_finite() && (!axes.log_x || x > 0.0) && (!axes.log_y || y > 0.0)
    };
    let cleaned: Vec<(String, Vec<(f64, f64)>)> = series
        .iter()
        .map(|s| (s.name.clone(), s.points.iter().copied().filter(keep).collect()))
        .collect();
    let all = || cleaned.iter().flat_map(|(_, p)| p.iter());
    let (x0, x1) = bounds(all().map(|p| p.0), axes.log_x);
    let (y0, y1) = bounds(all().map(|p| p.1), axes.log_y);
    match (axes.log_x, axes.log_y) {
        (false, false) => draw_lines(axes, &cleaned, x0..x1, y0..y1),
        (true, false) => draw_lines(axes, &cleaned, (x0..x1).log_scale(), y0..y1),
        (false, true) => draw_lines(axes, &cleaned, x0..x1, (y0..y1).log_scale()),
        (true, true) => draw_lines(axes, &cleaned, (x0..x1).log_scale(), (y0..y1).log_scale()),
    }
}

fn draw_lines<X, Y>(axes: Axes, series: &[(String, Vec<(f64, f64)>)], x: X, y: Y) -> Result<String>
where
    X: AsRangedCoord<Value = f64>,
    Y: AsRangedCoord<Value = f64>,
    X::CoordDescType: ValueFormatter<f64>,
    Y::CoordDescType: ValueFormatter<f64>,
{
    let mut out = String::new();
    {
        let root = SVGBackend::with_string(&mut out, (720, 480)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(axes.title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(64)
            .build_cartesian_2d(x, y)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc(axes.x_label)
            .y_desc(axes.y_label)
            .draw()
            .map_err(plot_err)?;
        for (i, (name, pts)) in series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            chart
                .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))
                .map_err(plot_err)?
                .label(name.as_str())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2)));
            chart
                .draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))
                .map_err(plot_err)?;
        }
        if series.len() > 1 {
            chart
                .configure_series_labels()
                .background_style(WHITE.mix(0.8))
                .border_style(BLACK)
                .draw()
                .map_err(plot_err)?;
        }
        root.present().map_err(plot_err)?;
    }
    Ok(out)
}

/// Side-by-side heatmaps, white at the smallest entry and dark blue at the
/// largest, each panel scaled on its own.
pub fn heatmaps(title: &str, panels: &[(&str, &Matrix)]) -> Result<String> {
    let mut out = String::new();
    {
        let width = 360 * panels.len().max(1) as u32;
        let root = SVGBackend::with_string(&mut out, (width, 420)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let root = root.titled(title, ("sans-serif", 20)).map_err(plot_err)?;
        let areas = root.split_evenly((1, panels.len().max(1)));
        for (area, (name, m)) in areas.iter().zip(panels) {
            let (rows, cols) = m.shape();
            let mut chart = ChartBuilder::on(area)
                .caption(*name, ("sans-serif", 16))
                .margin(10)
                .build_cartesian_2d(0..cols, 0..rows)
                .map_err(plot_err)?;
            let (lo, hi) = m
                .as_slice()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let span = if hi > lo { hi - lo } else { 1.0 };
            chart
                .draw_series((0..rows).flat_map(|i| {
                    (0..cols).map(move |j| {
                        let t = ((m[(i, j)] - lo) / span).clamp(0.0, 1.0);
                        let shade = |full: f64, dark: f64| (full + (dark - full) * t).round() as u8;
                        let color = RGBColor(shade(255.0, 8.0), shade(255.0, 48.0), shade(255.0, 107.0));
                        // Row 0 at the top.
                        Rectangle::new([(j, rows - 1 - i), (j + 1, rows - i)], color.filled())
                    })
                }))
                .map_err(plot_err)?;
        }
        root.present().map_err(plot_err)?;
    }
    Ok(out)
}

fn plot_err<E: std::fmt::Debug>(e: E) -> anyhow::Error {
    anyhow!("plotting failed: {e:?}")
}
