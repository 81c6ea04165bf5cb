//! Monte-Carlo estimate of the constant by which the relative entropy
//! controls the summed squared L1 distances to equilibrium, plus the
//! closed-form evaluation at the state (2,2,2,2) against the unit
//! equilibrium, which equals 2 ln 2 - 1.

use std::sync::Arc;

use rdlab::{
    compute_equilibrium, estimate_ckp, relative_entropy, Grid, Masses, SamplerConfig, State,
};

fn main() -> rdlab::Result<()> {
    let grid = Grid::line(1.0, 64)?;
    let masses = Masses::new(2.0, 2.0, 2.0)?;
    let eq = compute_equilibrium(masses, 1.0)?;

    let cfg = SamplerConfig::new(Arc::clone(&grid), masses, 6, 0.8, 13)?;
    let c = estimate_ckp(&cfg, &eq, 5000)?;
    println!(
        "C_hat = {:.6e} over {} samples ({} at equilibrium, excluded)",
        c.value, c.sample_count, c.excluded
    );

    let s = State::constant(&grid, [2.0; 4], 0.0)?;
    let point = relative_entropy(&s, &eq) / 4.0;
    println!(
        "closed-form point (2,2,2,2) vs (1,1,1,1): {point:.15} \
         (2 ln 2 - 1 = {:.15})",
        2.0 * std::f64::consts::LN_2 - 1.0
    );
    Ok(())
}
