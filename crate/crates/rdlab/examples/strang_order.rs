//! Richardson study of the split integrator on a smooth homogeneous
//! reference problem (diffusion is exact on constants, so the measured error
//! is the time integrator's own).

use rdlab::validation::oracles;
use rdlab::{
    strang_step, DiffusionCoeffs, Grid, IntegratorConfig, LaplacianStencil, Splitting, State,
};

fn main() -> rdlab::Result<()> {
    let grid = Grid::line(1.0, 4)?;
    let stencil = LaplacianStencil::new(&grid);
    let d = DiffusionCoeffs::degenerate(1.0, 0.5, 2.0)?;
    let u0 = [2.0, 2.0, 0.5, 0.5];
    let reference = oracles::rk4(u0, 1.0, 1e-6);

    let mut previous: Option<f64> = None;
    println!("dt        final-state error   observed order");
    for k in 0..5 {
        let dt = 8e-3 / 2f64.powi(k);
        let cfg = IntegratorConfig::new(dt, 0.9, 1.0, Splitting::Strang)?;
        let mut state = State::constant(&grid, u0, 0.0)?;
        for _ in 0..(1.0 / dt).round() as usize {
            state = strang_step(&state, &d, &stencil, &cfg, dt)?;
        }
        let err = (0..4)
            .map(|i| (state.component(i).values()[0] - reference[i]).abs())
            .fold(0.0, f64::max);
        match previous {
            Some(prev) => println!("{dt:<9.1e} {err:<19.3e} {:.3}", (prev / err).log2()),
            None => println!("{dt:<9.1e} {err:<19.3e} -"),
        }
        previous = Some(err);
    }
    Ok(())
}
