//! Monte-Carlo estimate of the entropy-to-production constant: the supremum
//! of H / (D_tilde * log factor * norm factor) over mass-consistent random
//! states, on an interval (q = 1) and on a square (q = 1 + gamma).

use std::sync::Arc;

use rdlab::{compute_equilibrium, estimate_k1, DiffusionCoeffs, Grid, Masses, SamplerConfig};

fn main() -> rdlab::Result<()> {
    let masses = Masses::new(2.0, 2.0, 2.0)?;
    let d = DiffusionCoeffs::degenerate(1.0, 0.5, 2.0)?;
    let eq = compute_equilibrium(masses, 1.0)?;

    let grid = Grid::line(1.0, 64)?;
    let cfg = SamplerConfig::new(Arc::clone(&grid), masses, 6, 0.8, 5)?;
    let k1 = estimate_k1(&cfg, &d, &eq, 1.0, 5000)?;
    println!(
        "1D (q = 1):        K1_hat = {:.6e} ({} samples, {} excluded)",
        k1.value, k1.sample_count, k1.excluded
    );

    let grid = Grid::rect(1.0, 1.0, 32, 32)?;
    for gamma in [0.5, 1.0, 2.0] {
        let cfg = SamplerConfig::new(Arc::clone(&grid), masses, 4, 0.8, 5)?;
        let k1 = estimate_k1(&cfg, &d, &eq, 1.0 + gamma, 5000)?;
        println!("2D (q = 1 + {gamma}):  K1_hat = {:.6e}", k1.value);
    }
    Ok(())
}
