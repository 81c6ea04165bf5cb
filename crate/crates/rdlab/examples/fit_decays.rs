//! Decay-law fitting on synthetic series: a pure exponential, a stretched
//! exponential (fitted through the double-log transform with an amplitude
//! search), and a degenerate constant series.

use rdlab::{fit_exponential, fit_stretched_exponential};

fn main() -> rdlab::Result<()> {
    let times: Vec<f64> = (0..40).map(|k| 0.5 * k as f64).collect();

    let exp_series: Vec<f64> = times.iter().map(|&t| 3.0 * (-0.5 * t).exp()).collect();
    let fit = fit_exponential(&times, &exp_series)?;
    println!(
        "exponential: rate {:.6} (true 0.5), amplitude {:.6} (true 3), r^2 {:.9}",
        fit.rate, fit.amplitude, fit.r_squared
    );

    let stretched: Vec<f64> = times
        .iter()
        .map(|&t| (2.0 - 2.0 * (1.0 + t).powf(0.7)).exp())
        .collect();
    let fit = fit_stretched_exponential(&times, &stretched)?;
    println!(
        "stretched:   rate {:.6} (true 2), exponent {:.6} (true 0.7), r^2 {:.9}",
        fit.rate, fit.stretch_exponent, fit.r_squared
    );

    let constant = vec![5.0; times.len()];
    let fit = fit_exponential(&times, &constant)?;
    println!(
        "constant:    degenerate = {}, rate {}, r^2 {}",
        fit.degenerate, fit.rate, fit.r_squared
    );
    Ok(())
}
