//! Structure-preserving simulator and diagnostics laboratory for a
//! four-species reversible reaction-diffusion system
//!
//! ```text
//! d/dt u1 - d1 lap u1 = -(u1 u2 - u3 u4)
//! d/dt u2 - d2 lap u2 = -(u1 u2 - u3 u4)
//! d/dt u3 - d3 lap u3 = +(u1 u2 - u3 u4)
//! d/dt u4 - d4 lap u4 = +(u1 u2 - u3 u4)
//! ```
//!
//! on an interval or rectangle with zero-flux boundaries, where `d4 = 0`
//! (the degenerate case, one species without self diffusion) is the case of
//! interest and `d4 > 0` is supported as a configuration.
//!
//! The crate provides:
//!
//! * [`grid`] — cell-averaged fields on uniform grids, conserved totals,
//!   volume-weighted norms;
//! * [`equilibrium`] — the closed-form unique positive equilibrium fixed by
//!   the conserved totals and detailed balance;
//! * [`ops`] — zero-flux finite-volume Laplacian, face-gradient energies,
//!   backward-Euler diffusion solves (tridiagonal in 1D, preconditioned
//!   conjugate gradients in 2D);
//! * [`dynamics`] — positivity-preserving, exactly mass-conserving split
//!   time integrator with entropy diagnostics along the trajectory;
//! * [`diag`] — relative entropy, entropy production, its Fisher-type lower
//!   bound, and distance diagnostics;
//! * [`fit`] — exponential, stretched-exponential and algebraic-growth fits
//!   for sampled diagnostics;
//! * [`lab`] — mass-consistent random-state sampling and Monte-Carlo
//!   estimation of the empirical inequality constants;
//! * [`runner`] — scenario files, CSV/JSON/SVG emission and the `rdlab`
//!   binary's modes;
//! * [`validation`] — the self-check suite behind `mode = "validate"` and
//!   the acceptance tests.
//!
//! Everything is deterministic for a fixed configuration and seed: fixed
//! reduction orders, seeded ChaCha streams per sample index, and
//! byte-reproducible output files.

// Validation sites use `!(x > 0)` so that NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diag;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod fit;
pub mod grid;
pub mod lab;
pub mod ops;
pub mod runner;
pub mod validation;

pub use diag::{
    ckp_ratio, default_lq_exponent, diagnostics_record, entropy_production, fisher_surrogate,
    relative_entropy, sqrt_u4_variance, DiagnosticsRecord,
};
pub use dynamics::{
    evolve, evolve_with_lq, max_stable_reaction_dt, reaction_rates, reaction_substep, strang_step,
    IntegratorConfig, Splitting, TrajectoryRecord,
};
pub use equilibrium::{compute_equilibrium, equilibrium_residual, Equilibrium};
pub use error::{Error, Result};
pub use fit::{
    fit_exponential, fit_stretched_exponential, growth_fit, DecayFit, DecayKind, GrowthFit,
};
pub use grid::{integrate, masses_of, DiffusionCoeffs, DomainSpec, Field, Grid, Masses, State};
pub use lab::{
    estimate_beta, estimate_ckp, estimate_k1, indirect_diffusion_ratio, quasi_uniform_predicate,
    sample_state, sample_state_indexed, BoundKind, EmpiricalConstant, SampleToken, SamplerConfig,
};
pub use ops::LaplacianStencil;
