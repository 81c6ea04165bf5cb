//! Minimal standalone SVG line plots, byte-deterministic for fixed input.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Log-10 vertical axis; every y value must be positive.
    pub log_y: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            title: String::new(),
            x_label: "t".to_string(),
            y_label: String::new(),
            log_y: false,
        }
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f",
];

/// Renders the plot as an SVG document string.
pub fn render_svg_lineplot(series: &[PlotSeries], opts: &PlotOptions) -> Result<String> {
    if series.is_empty() {
        return Err(Error::param("at least one series is required".to_string()));
    }
    for s in series {
        if s.points.len() < 2 {
            return Err(Error::param(format!(
                "series '{}' needs at least 2 points",
                s.label
            )));
        }
        for &(x, y) in &s.points {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::param(format!(
                    "series '{}' contains a non-finite point",
                    s.label
                )));
            }
            if opts.log_y && y <= 0.0 {
                return Err(Error::param(format!(
                    "log-scale plot requires positive values; series '{}' has {y}",
                    s.label
                )));
            }
        }
    }

    let ty = |y: f64| if opts.log_y { y.log10() } else { y };
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(ty(y));
            ymax = ymax.max(ty(y));
        }
    }
    if xmax == xmin {
        xmax = xmin + 1.0;
    }
    if ymax == ymin {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * plot_w;
    let py = |y: f64| MARGIN_T + (ymax - ty(y)) / (ymax - ymin) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-family=\"monospace\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(&opts.title)
    ));

    // Axes box.
    out.push_str(&format!(
        "<rect x=\"{MARGIN_L:.1}\" y=\"{MARGIN_T:.1}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" \
         fill=\"none\" stroke=\"black\"/>\n"
    ));

    // Ticks: five per axis, labeled in data coordinates.
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = xmin + f * (xmax - xmin);
        let xq = MARGIN_L + f * plot_w;
        out.push_str(&format!(
            "<line x1=\"{xq:.1}\" y1=\"{:.1}\" x2=\"{xq:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{xq:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            MARGIN_T + plot_h + 18.0,
            tick_label(xv)
        ));

        let yv = ymin + f * (ymax - ymin);
        let yq = MARGIN_T + plot_h - f * plot_h;
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{yq:.1}\" x2=\"{MARGIN_L:.1}\" y2=\"{yq:.1}\" stroke=\"black\"/>\n",
            MARGIN_L - 5.0
        ));
        let label = if opts.log_y {
            format!("1e{yv:.1}")
        } else {
            tick_label(yv)
        };
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"end\">{label}</text>\n",
            MARGIN_L - 8.0,
            yq + 4.0
        ));
    }

    // Axis labels.
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(&opts.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        escape(&opts.y_label)
    ));

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for &(x, y) in &s.points {
            pts.push_str(&format!("{:.3},{:.3} ", px(x), py(y)));
        }
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.trim_end()
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"{color}\">{}</text>\n",
            MARGIN_L + plot_w - 150.0,
            MARGIN_T + 16.0 + 14.0 * i as f64,
            escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes the plot to `path`.
pub fn emit_svg_lineplot(series: &[PlotSeries], opts: &PlotOptions, path: &Path) -> Result<()> {
    let doc = render_svg_lineplot(series, opts)?;
    std::fs::write(path, doc)?;
    Ok(())
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
