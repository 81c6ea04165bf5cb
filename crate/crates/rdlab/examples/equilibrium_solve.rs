//! Computes the unique positive equilibrium for a few sets of conserved
//! totals and checks the defining equations by their residuals.

use rdlab::{compute_equilibrium, equilibrium_residual, Masses};

fn main() -> rdlab::Result<()> {
    for (m13, m14, m23, volume) in [
        (2.0, 2.0, 2.0, 1.0),
        (1.0, 2.0, 3.0, 1.0),
        (2.0, 2.0, 2.0, 2.0),
        (0.3, 1.7, 0.9, 0.5),
    ] {
        let eq = compute_equilibrium(Masses::new(m13, m14, m23)?, volume)?;
        let r = equilibrium_residual(&eq);
        println!(
            "totals ({m13}, {m14}, {m23}) on |domain| = {volume}  ->  \
             ({:.6}, {:.6}, {:.6}, {:.6})",
            eq.u1_inf, eq.u2_inf, eq.u3_inf, eq.u4_inf
        );
        println!(
            "    product balance {:.3e}, residuals ({:.1e}, {:.1e}, {:.1e}, {:.1e})",
            eq.u1_inf * eq.u2_inf - eq.u3_inf * eq.u4_inf,
            r[0],
            r[1],
            r[2],
            r[3]
        );
    }

    // Totals with m14 + m23 - m13 <= 0 admit no strictly positive state.
    let err = compute_equilibrium(Masses::new(5.0, 2.0, 2.0)?, 1.0).unwrap_err();
    println!("totals (5, 2, 2): {err}");
    Ok(())
}
