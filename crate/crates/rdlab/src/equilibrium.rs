//! The unique positive equilibrium fixed by the conserved totals.
//!
//! The equilibrium satisfies detailed balance `u1*u2 = u3*u4` together with
//! the three independent mass constraints. Writing `a = m13/|Omega|`,
//! `b = m14/|Omega|`, `c = m23/|Omega|`, substitution reduces the 4x4 system
//! to a closed form:
//!
//! ```text
//! u1 = a*b/(b+c)            u3 = a*c/(b+c)
//! u4 = b*(b+c-a)/(b+c)      u2 = c*(b+c-a)/(b+c)
//! ```
//!
//! All four components are positive exactly when `m24 = m14 + m23 - m13 > 0`.

use crate::error::{Error, Result};
use crate::grid::Masses;

/// Constant equilibrium quadruple plus the totals that determine it.
#[derive(Clone, Copy, Debug)]
pub struct Equilibrium {
    pub u1_inf: f64,
    pub u2_inf: f64,
    pub u3_inf: f64,
    pub u4_inf: f64,
    pub masses: Masses,
    pub volume: f64,
}

impl Equilibrium {
    pub fn component(&self, i: usize) -> f64 {
        [self.u1_inf, self.u2_inf, self.u3_inf, self.u4_inf][i]
    }

    pub fn components(&self) -> [f64; 4] {
        [self.u1_inf, self.u2_inf, self.u3_inf, self.u4_inf]
    }
}

/// Solves the equilibrium system for the given totals and domain volume.
pub fn compute_equilibrium(masses: Masses, volume: f64) -> Result<Equilibrium> {
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::param(format!(
            "volume must be positive, got {volume}"
        )));
    }
    let m24 = masses.m24();
    if !(m24 > 0.0) {
        return Err(Error::NoPositiveEquilibrium { m24 });
    }
    let a = masses.m13() / volume;
    let b = masses.m14() / volume;
    let c = masses.m23() / volume;
    let s = b + c;
    let rest = s - a; // = m24 / volume, positive by the check above
    Ok(Equilibrium {
        u1_inf: a * b / s,
        u2_inf: c * rest / s,
        u3_inf: a * c / s,
        u4_inf: b * rest / s,
        masses,
        volume,
    })
}

/// Residuals of the four equilibrium equations at `eq`, in the order
/// (detailed balance, m13, m14, m23). Mass residuals are
/// `m_ij - (u_i + u_j) * volume`.
pub fn equilibrium_residual(eq: &Equilibrium) -> [f64; 4] {
    let v = eq.volume;
    [
        eq.u1_inf * eq.u2_inf - eq.u3_inf * eq.u4_inf,
        eq.masses.m13() - (eq.u1_inf + eq.u3_inf) * v,
        eq.masses.m14() - (eq.u1_inf + eq.u4_inf) * v,
        eq.masses.m23() - (eq.u2_inf + eq.u3_inf) * v,
    ]
}
