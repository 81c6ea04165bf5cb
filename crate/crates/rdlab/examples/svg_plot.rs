//! Renders a standalone SVG line plot (log vertical axis) from two synthetic
//! decay series. The output bytes depend only on the input.

use rdlab::runner::{emit_svg_lineplot, PlotOptions, PlotSeries};

fn main() -> rdlab::Result<()> {
    let times: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
    let series = vec![
        PlotSeries {
            label: "exp(-0.5 t)".to_string(),
            points: times.iter().map(|&t| (t, (-0.5 * t).exp())).collect(),
        },
        PlotSeries {
            label: "exp(-2 (1+t)^0.7) e^2".to_string(),
            points: times
                .iter()
                .map(|&t| (t, (2.0 - 2.0 * (1.0 + t).powf(0.7)).exp()))
                .collect(),
        },
    ];
    let path = std::env::temp_dir().join("rdlab-decays.svg");
    emit_svg_lineplot(
        &series,
        &PlotOptions {
            title: "exponential vs stretched-exponential decay".to_string(),
            y_label: "value".to_string(),
            log_y: true,
            ..Default::default()
        },
        &path,
    )?;
    println!("wrote {}", path.display());
    Ok(())
}
