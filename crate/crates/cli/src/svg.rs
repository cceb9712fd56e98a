//! Minimal deterministic SVG rendering: line panels and histogram panels
//! composed into vertical stacks. No timestamps, no randomness; equal data
//! gives identical bytes.

use std::fmt::Write as _;

use crate::CliError;

const PANEL_WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 240.0;
const MARGIN_LEFT: f64 = 58.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 34.0;

const SERIES_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

pub enum Panel {
    Lines {
        title: String,
        x_label: String,
        y_label: String,
        series: Vec<Series>,
    },
    Histogram {
        title: String,
        x_label: String,
        lows: Vec<f64>,
        highs: Vec<f64>,
        counts: Vec<f64>,
    },
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn range(values: impl Iterator<Item = f64>) -> Result<(f64, f64), CliError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut any = false;
    for v in values {
        if v.is_finite() {
            any = true;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !any {
        return Err(CliError::Io("empty series".into()));
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    Ok((lo, hi))
}

struct Scale {
    lo: f64,
    hi: f64,
    pixels: f64,
    offset: f64,
    inverted: bool,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let t = (v - self.lo) / (self.hi - self.lo);
        if self.inverted {
            self.offset + self.pixels * (1.0 - t)
        } else {
            self.offset + self.pixels * t
        }
    }
}

fn render_panel(out: &mut String, panel: &Panel, y_base: f64) -> Result<(), CliError> {
    let plot_w = PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let (title, x_label, y_label, x_range, y_range) = match panel {
        Panel::Lines {
            title,
            x_label,
            y_label,
            series,
        } => {
            if series.is_empty() || series.iter().any(|s| s.xs.is_empty()) {
                return Err(CliError::Io("empty series".into()));
            }
            let xr = range(series.iter().flat_map(|s| s.xs.iter().cloned()))?;
            let yr = range(series.iter().flat_map(|s| s.ys.iter().cloned()))?;
            (title.clone(), x_label.clone(), y_label.clone(), xr, yr)
        }
        Panel::Histogram {
            title,
            x_label,
            lows,
            highs,
            counts,
        } => {
            if counts.is_empty() {
                return Err(CliError::Io("empty series".into()));
            }
            let xr = range(lows.iter().cloned().chain(highs.iter().cloned()))?;
            let yr = (0.0, counts.iter().cloned().fold(1.0, f64::max));
            (title.clone(), x_label.clone(), "count".into(), xr, yr)
        }
    };

    let x_scale = Scale {
        lo: x_range.0,
        hi: x_range.1,
        pixels: plot_w,
        offset: MARGIN_LEFT,
        inverted: false,
    };
    let y_scale = Scale {
        lo: y_range.0,
        hi: y_range.1,
        pixels: plot_h,
        offset: y_base + MARGIN_TOP,
        inverted: true,
    };

    let _ = write!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(y_base + MARGIN_TOP),
        fmt(plot_w),
        fmt(plot_h)
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"monospace\">{}</text>\n",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(y_base + 16.0),
        title
    );
    // Axis ticks: four per axis.
    for i in 0..=4 {
        let tx = x_range.0 + (x_range.1 - x_range.0) * i as f64 / 4.0;
        let px = x_scale.map(tx);
        let _ = write!(
            out,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#999\" stroke-width=\"0.5\"/>\n<text x=\"{0}\" y=\"{3}\" font-size=\"10\" text-anchor=\"middle\" font-family=\"monospace\">{4}</text>\n",
            fmt(px),
            fmt(y_base + MARGIN_TOP + plot_h),
            fmt(y_base + MARGIN_TOP + plot_h + 4.0),
            fmt(y_base + MARGIN_TOP + plot_h + 16.0),
            fmt(tx)
        );
        let ty = y_range.0 + (y_range.1 - y_range.0) * i as f64 / 4.0;
        let py = y_scale.map(ty);
        let _ = write!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\" font-family=\"monospace\">{}</text>\n",
            fmt(MARGIN_LEFT - 4.0),
            fmt(py + 3.0),
            fmt(ty)
        );
    }
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"monospace\">{}</text>\n",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(y_base + PANEL_HEIGHT - 6.0),
        x_label
    );
    let _ = write!(
        out,
        "<text x=\"14\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"monospace\" transform=\"rotate(-90 14 {})\">{}</text>\n",
        fmt(y_base + MARGIN_TOP + plot_h / 2.0),
        fmt(y_base + MARGIN_TOP + plot_h / 2.0),
        y_label
    );

    match panel {
        Panel::Lines { series, .. } => {
            for (idx, s) in series.iter().enumerate() {
                let color = SERIES_COLORS[idx % SERIES_COLORS.len()];
                let mut points = String::new();
                for (x, y) in s.xs.iter().zip(&s.ys) {
                    let _ = write!(points, "{},{} ", fmt(x_scale.map(*x)), fmt(y_scale.map(*y)));
                }
                let _ = write!(
                    out,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"/>\n",
                    points.trim_end(),
                    color
                );
                let _ = write!(
                    out,
                    "<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"{}\" font-family=\"monospace\">{}</text>\n",
                    fmt(MARGIN_LEFT + 6.0),
                    fmt(y_base + MARGIN_TOP + 12.0 + 12.0 * idx as f64),
                    color,
                    s.label
                );
            }
        }
        Panel::Histogram {
            lows,
            highs,
            counts,
            ..
        } => {
            let base_y = y_scale.map(0.0);
            for ((lo, hi), count) in lows.iter().zip(highs).zip(counts) {
                let x0 = x_scale.map(*lo);
                let x1 = x_scale.map(*hi);
                let y1 = y_scale.map(*count);
                let _ = write!(
                    out,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#1f77b4\" stroke=\"none\"/>\n",
                    fmt(x0),
                    fmt(y1),
                    fmt((x1 - x0).max(0.0)),
                    fmt((base_y - y1).max(0.0))
                );
            }
        }
    }
    Ok(())
}

/// Renders panels stacked vertically into one SVG document.
pub fn render_stack(panels: &[Panel]) -> Result<String, CliError> {
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        fmt(PANEL_WIDTH),
        fmt(height),
        fmt(PANEL_WIDTH),
        fmt(height)
    );
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, PANEL_HEIGHT * i as f64)?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg(path: &std::path::Path, panels: &[Panel]) -> Result<(), CliError> {
    let text = render_stack(panels)?;
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}
