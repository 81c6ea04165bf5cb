//! The closeness-of-diffusion predicate |d_i - d3| / (d_i + d3) < delta for
//! i = 1 or 2, with a user-supplied threshold.

use rdlab::{quasi_uniform_predicate, DiffusionCoeffs};

fn main() -> rdlab::Result<()> {
    let cases = [
        (DiffusionCoeffs::new(1.0, 5.0, 1.0, 0.0)?, 1, 0.1),
        (DiffusionCoeffs::new(3.0, 5.0, 1.0, 0.0)?, 1, 0.4),
        (DiffusionCoeffs::new(1.1, 5.0, 1.0, 0.0)?, 1, 0.1),
        (DiffusionCoeffs::new(3.0, 1.2, 1.0, 0.0)?, 2, 0.1),
    ];
    for (d, i, delta) in cases {
        let di = if i == 1 { d.d1 } else { d.d2 };
        println!(
            "d{i} = {di}, d3 = {}: |d{i}-d3|/(d{i}+d3) = {:.4} < {delta}?  {}",
            d.d3,
            (di - d.d3).abs() / (di + d.d3),
            quasi_uniform_predicate(&d, i, delta)?
        );
    }
    Ok(())
}
