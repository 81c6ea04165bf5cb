//! Pure diffusion sanity check: the first zero-flux cosine mode on [0, 1]
//! decays at rate d * pi^2; the backward-Euler solve reproduces it.

use rdlab::{fit_exponential, Field, Grid, LaplacianStencil};

fn main() -> rdlab::Result<()> {
    let grid = Grid::line(1.0, 256)?;
    let stencil = LaplacianStencil::new(&grid);
    let d = 1.0;
    let dt = 5e-4;

    let mut f = Field::from_fn(&grid, |x| (std::f64::consts::PI * x[0]).cos());
    let mut times = Vec::new();
    let mut amplitudes = Vec::new();
    for k in 0..=1400 {
        if k > 0 {
            f = stencil.implicit_diffusion_solve(&f, d, dt)?;
        }
        times.push(k as f64 * dt);
        amplitudes.push(f.lp_norm(2.0)?);
    }

    let fit = fit_exponential(&times, &amplitudes)?;
    let target = d * std::f64::consts::PI.powi(2);
    println!("fitted decay rate : {:.6}", fit.rate);
    println!("d * pi^2          : {target:.6}");
    println!(
        "relative error    : {:.3e} (r^2 = {:.9})",
        (fit.rate - target).abs() / target,
        fit.r_squared
    );
    Ok(())
}
