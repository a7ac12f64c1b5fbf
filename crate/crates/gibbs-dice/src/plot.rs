//! SVG scatter plot of xxy tossing data against fitted model curves.
//!
//! One marker per cuboid at `(s_y/s_x, f_xx)` with a vertical error bar of
//! `sqrt(f_xx/n_xx)` (the conventional binomial `sqrt(f(1-f)/N)` is available
//! behind an option) and a horizontal bar of `ε·sqrt(2)·(s_y/s_x)` for the
//! side-length tolerance; each series is overlaid with its model curve
//! `p_xx(r, β)` sampled on a ratio grid.

use crate::error::{Error, Result};
use crate::estimation::XxyObservation;
use crate::gibbs::pxx_from_pair;

/// One dataset to draw: its rows and the beta of its model curve.
#[derive(Debug, Clone)]
pub struct PlotSeries {
    pub label: String,
    pub rows: Vec<XxyObservation>,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PlotOptions {
    /// Relative side-length uncertainty for the horizontal bars.
    pub epsilon: f64,
    /// Use `sqrt(f(1-f)/N)` for the vertical bars instead of `sqrt(f/n_xx)`.
    pub binomial_errors: bool,
    /// Sample count of each model curve.
    pub curve_points: usize,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            binomial_errors: false,
            curve_points: 200,
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// `p_xx` as a function of the side ratio `r = s_y/s_x` alone; the
/// geometric-mean energies reduce to `E_x = r^(-1/3)`, `E_y = r^(2/3)`.
pub fn pxx_of_ratio(ratio: f64, beta: f64) -> f64 {
    pxx_from_pair(ratio.powf(-1.0 / 3.0), ratio.powf(2.0 / 3.0), beta)
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Render the scatter-plus-curves figure. Errors if no series or an empty
/// series is supplied.
pub fn render_xxy_scatter(series: &[PlotSeries], opts: &PlotOptions) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptyData("no series to plot".to_string()));
    }
    for s in series {
        if s.rows.is_empty() {
            return Err(Error::EmptyData(format!(
                "series `{}` has no rows",
                s.label
            )));
        }
    }
    let mut r_min = f64::INFINITY;
    let mut r_max = f64::NEG_INFINITY;
    for s in series {
        for row in &s.rows {
            r_min = r_min.min(row.side_ratio());
            r_max = r_max.max(row.side_ratio());
        }
    }
    let pad = 0.05 * (r_max - r_min).max(0.1);
    let (x_lo, x_hi) = (r_min - pad, r_max + pad);
    let (y_lo, y_hi) = (0.0f64, 1.0f64);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_px = |r: f64| MARGIN_LEFT + (r - x_lo) / (x_hi - x_lo) * plot_w;
    let y_px = |f: f64| MARGIN_TOP + (y_hi - f) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes, ticks, grid
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(plot_w),
        fmt(plot_h)
    ));
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let y = y_px(f);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ddd\"/>\n",
            fmt(MARGIN_LEFT),
            fmt(y),
            fmt(MARGIN_LEFT + plot_w),
            fmt(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"12\">{:.1}</text>\n",
            fmt(MARGIN_LEFT - 8.0),
            fmt(y + 4.0),
            f
        ));
    }
    for i in 0..=5 {
        let r = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let x = x_px(r);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            fmt(x),
            fmt(MARGIN_TOP + plot_h),
            fmt(x),
            fmt(MARGIN_TOP + plot_h + 6.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{r:.2}</text>\n",
            fmt(x),
            fmt(MARGIN_TOP + plot_h + 22.0)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">side ratio s_y / s_x</text>\n",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(HEIGHT - 14.0)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\" \
         transform=\"rotate(-90 18 {})\">f_xx</text>\n",
        fmt(MARGIN_TOP + plot_h / 2.0),
        fmt(MARGIN_TOP + plot_h / 2.0)
    ));

    let mut zero_count_rows = false;
    for (si, s) in series.iter().enumerate() {
        let color = COLORS[si % COLORS.len()];

        // model curve
        let n_pts = opts.curve_points.max(2);
        let mut points = Vec::with_capacity(n_pts);
        for i in 0..n_pts {
            let r = x_lo + (x_hi - x_lo) * i as f64 / (n_pts - 1) as f64;
            if r <= 0.0 {
                continue;
            }
            points.push(format!(
                "{},{}",
                fmt(x_px(r)),
                fmt(y_px(pxx_of_ratio(r, s.beta)))
            ));
        }
        svg.push_str(&format!(
            "<polyline class=\"model\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
             points=\"{}\"/>\n",
            points.join(" ")
        ));

        // markers and error bars
        for row in &s.rows {
            let r = row.side_ratio();
            let f = row.f_xx();
            let (x, y) = (x_px(r), y_px(f));
            let dx = opts.epsilon * std::f64::consts::SQRT_2 * r;
            svg.push_str(&format!(
                "<line class=\"xerr\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\"/>\n",
                fmt(x_px(r - dx)),
                fmt(y),
                fmt(x_px(r + dx)),
                fmt(y)
            ));
            if row.n_xx > 0 || opts.binomial_errors {
                let df = if opts.binomial_errors {
                    (f * (1.0 - f) / row.n as f64).sqrt()
                } else {
                    (f / row.n_xx as f64).sqrt()
                };
                svg.push_str(&format!(
                    "<line class=\"yerr\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\"/>\n",
                    fmt(x),
                    fmt(y_px((f + df).min(1.0))),
                    fmt(x),
                    fmt(y_px((f - df).max(0.0)))
                ));
            } else {
                zero_count_rows = true;
            }
            svg.push_str(&format!(
                "<circle class=\"marker\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>\n",
                fmt(x),
                fmt(y)
            ));
        }

        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"{color}\">{} (beta = {:.3})</text>\n",
            fmt(MARGIN_LEFT + plot_w - 210.0),
            fmt(MARGIN_TOP + 18.0 + 18.0 * si as f64),
            xml_escape(&s.label),
            s.beta
        ));
    }
    if zero_count_rows {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#555\">rows with n_xx = 0 carry no \
             vertical bar</text>\n",
            fmt(MARGIN_LEFT + 6.0),
            fmt(MARGIN_TOP + plot_h - 8.0)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
