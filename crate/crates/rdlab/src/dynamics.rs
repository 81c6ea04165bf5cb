//! Mass-action reaction terms and the positivity-preserving, mass-conserving
//! split time integrator.
//!
//! One step of the default Strang composition is
//!
//! ```text
//! half implicit diffusion  ->  reaction sweep over dt  ->  half implicit diffusion
//! ```
//!
//! Diffusion substeps are backward Euler (unconditionally stable, discrete
//! maximum principle). The reaction sweep subdivides `dt` so every explicit
//! substep respects the positivity bound derived from the current sup norms,
//! and advances each substep with the explicit trapezoid (Heun) rule, which
//! keeps the sweep second order while preserving the exact cellwise
//! cancellation of the reaction increments: both stages add the identical
//! `delta` to `u3`, `u4` that they subtract from `u1`, `u2`, so all three
//! conserved totals move only by round-off.

use std::sync::Arc;

use crate::diag::{default_lq_exponent, diagnostics_record, DiagnosticsRecord};
use crate::equilibrium::compute_equilibrium;
use crate::error::{Error, Result};
use crate::grid::{masses_of, DiffusionCoeffs, Field, State};
use crate::ops::LaplacianStencil;

/// Guard against division by zero in the reaction time-step bound.
const TINY_SUP: f64 = 1e-30;

/// Largest admissible relative mass drift along a trajectory.
const MASS_DRIFT_LIMIT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Lie,
    Strang,
}

/// Time-integration parameters.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorConfig {
    pub dt_max: f64,
    /// Safety factor for the explicit reaction bound, in (0, 1].
    pub theta: f64,
    pub t_end: f64,
    pub splitting: Splitting,
}

impl IntegratorConfig {
    pub fn new(dt_max: f64, theta: f64, t_end: f64, splitting: Splitting) -> Result<Self> {
        if !(dt_max > 0.0) {
            return Err(Error::param(format!(
                "dt_max must be positive, got {dt_max}"
            )));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::param(format!(
                "theta must lie in (0, 1], got {theta}"
            )));
        }
        if !(t_end > 0.0) {
            return Err(Error::param(format!("t_end must be positive, got {t_end}")));
        }
        Ok(IntegratorConfig {
            dt_max,
            theta,
            t_end,
            splitting,
        })
    }
}

/// Sampled diagnostics plus the final state of one run.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: State,
}

impl TrajectoryRecord {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }
}

/// Cellwise mass-action rates: `f1 = f2 = -(u1 u2 - u3 u4)`,
/// `f3 = f4 = +(u1 u2 - u3 u4)`. The pairwise sums `f1 + f3`, `f1 + f4`,
/// `f2 + f3` vanish bitwise because one shared expression is negated.
pub fn reaction_rates(state: &State) -> [Field; 4] {
    let grid = Arc::clone(state.grid());
    let n = grid.num_cells();
    let (u1, u2, u3, u4) = (
        state.u1().values(),
        state.u2().values(),
        state.u3().values(),
        state.u4().values(),
    );
    let mut gain = vec![0.0; n];
    let mut loss = vec![0.0; n];
    for c in 0..n {
        let p = u1[c] * u2[c] - u3[c] * u4[c];
        gain[c] = p;
        loss[c] = -p;
    }
    [
        Field::new(Arc::clone(&grid), loss.clone()).unwrap(),
        Field::new(Arc::clone(&grid), loss).unwrap(),
        Field::new(Arc::clone(&grid), gain.clone()).unwrap(),
        Field::new(Arc::clone(&grid), gain).unwrap(),
    ]
}

/// Positivity bound for one explicit reaction step: with
/// `dt <= theta / max_i ||u_i||_inf`, every cellwise loss term is at most
/// `theta` times the cell's own value, so an explicit Euler update cannot
/// cross zero.
pub fn max_stable_reaction_dt(state: &State, theta: f64) -> f64 {
    theta / state.max_sup().max(TINY_SUP)
}

/// One explicit Euler reaction step `u_i <- u_i + dt * f_i`. Requires `dt`
/// within the positivity bound at `theta = 1`.
pub fn reaction_substep(state: &State, dt: f64) -> Result<State> {
    if !(dt >= 0.0) {
        return Err(Error::param(format!("dt must be nonnegative, got {dt}")));
    }
    if dt > max_stable_reaction_dt(state, 1.0) {
        return Err(Error::param(format!(
            "dt = {dt} exceeds the positivity bound {}",
            max_stable_reaction_dt(state, 1.0)
        )));
    }
    let mut out = state.clone();
    euler_reaction_in_place(&mut out, dt);
    if out.min_value() < 0.0 || !out.is_finite() {
        return Err(Error::numerical(
            state.time(),
            "reaction step lost positivity".to_string(),
        ));
    }
    Ok(out)
}

fn euler_reaction_in_place(state: &mut State, dt: f64) {
    let n = state.grid().num_cells();
    for c in 0..n {
        let p = state.u1().values()[c] * state.u2().values()[c]
            - state.u3().values()[c] * state.u4().values()[c];
        let delta = dt * p;
        state.component_mut(0).values_mut()[c] -= delta;
        state.component_mut(1).values_mut()[c] -= delta;
        state.component_mut(2).values_mut()[c] += delta;
        state.component_mut(3).values_mut()[c] += delta;
    }
}

/// One explicit trapezoid (Heun) reaction substep. The combined increment
/// `(dt/2)(p(u) + p(u*))` is a single value per cell applied with opposite
/// signs to the two species pairs, keeping the conserved totals exact.
fn heun_reaction_in_place(state: &mut State, dt: f64) {
    let n = state.grid().num_cells();
    let p0: Vec<f64> = (0..n)
        .map(|c| {
            state.u1().values()[c] * state.u2().values()[c]
                - state.u3().values()[c] * state.u4().values()[c]
        })
        .collect();
    for c in 0..n {
        let s1 = state.u1().values()[c] - dt * p0[c];
        let s2 = state.u2().values()[c] - dt * p0[c];
        let s3 = state.u3().values()[c] + dt * p0[c];
        let s4 = state.u4().values()[c] + dt * p0[c];
        let p1 = s1 * s2 - s3 * s4;
        let delta = 0.5 * dt * (p0[c] + p1);
        state.component_mut(0).values_mut()[c] -= delta;
        state.component_mut(1).values_mut()[c] -= delta;
        state.component_mut(2).values_mut()[c] += delta;
        state.component_mut(3).values_mut()[c] += delta;
    }
}

/// Integrates the reaction over an interval of length `dt` with Heun
/// substeps. Each substep length stays below `theta / ((1+theta) * sup)`,
/// which keeps both Heun stages inside the positivity region (the stage
/// values grow by at most a factor `1 + theta`).
fn reaction_sweep(state: &mut State, dt: f64, theta: f64) -> Result<()> {
    let mut remaining = dt;
    while remaining > 0.0 {
        let sup = state.max_sup().max(TINY_SUP);
        let bound = theta / ((1.0 + theta) * sup);
        let step = remaining.min(bound);
        heun_reaction_in_place(state, step);
        if !state.is_finite() {
            return Err(Error::numerical(
                state.time(),
                "reaction sweep produced a non-finite value".to_string(),
            ));
        }
        if state.min_value() < 0.0 {
            return Err(Error::numerical(
                state.time(),
                format!(
                    "reaction sweep lost positivity (min = {})",
                    state.min_value()
                ),
            ));
        }
        remaining -= step;
    }
    Ok(())
}

fn diffuse_in_place(
    state: &mut State,
    d: &DiffusionCoeffs,
    stencil: &LaplacianStencil,
    dt: f64,
) -> Result<()> {
    for i in 0..4 {
        let di = d.coeff(i);
        if di > 0.0 {
            let solved = stencil.implicit_diffusion_solve(state.component(i), di, dt)?;
            *state.component_mut(i) = solved;
        }
    }
    if !state.is_finite() {
        return Err(Error::numerical(
            state.time(),
            "diffusion solve produced a non-finite value".to_string(),
        ));
    }
    if state.min_value() < 0.0 {
        return Err(Error::numerical(
            state.time(),
            format!(
                "diffusion solve lost positivity (min = {})",
                state.min_value()
            ),
        ));
    }
    Ok(())
}

/// One full split step of length `dt`, advancing `state.time` by `dt`.
pub fn strang_step(
    state: &State,
    d: &DiffusionCoeffs,
    stencil: &LaplacianStencil,
    cfg: &IntegratorConfig,
    dt: f64,
) -> Result<State> {
    if !(dt > 0.0) {
        return Err(Error::param(format!("dt must be positive, got {dt}")));
    }
    let mut out = state.clone();
    match cfg.splitting {
        Splitting::Strang => {
            diffuse_in_place(&mut out, d, stencil, 0.5 * dt)?;
            reaction_sweep(&mut out, dt, cfg.theta)?;
            diffuse_in_place(&mut out, d, stencil, 0.5 * dt)?;
        }
        Splitting::Lie => {
            diffuse_in_place(&mut out, d, stencil, dt)?;
            reaction_sweep(&mut out, dt, cfg.theta)?;
        }
    }
    out.set_time(state.time() + dt);
    Ok(out)
}

/// Integrates from `initial` to `cfg.t_end`, recording diagnostics every
/// `sample_every` time units (plus the initial and final instants).
///
/// Along the whole trajectory the integrator asserts nonnegativity, finite
/// values, and relative drift of the conserved totals below 1e-10; any
/// violation aborts with a numerical-failure error carrying the offending
/// time.
pub fn evolve(
    initial: &State,
    d: &DiffusionCoeffs,
    cfg: &IntegratorConfig,
    sample_every: f64,
) -> Result<TrajectoryRecord> {
    let q = default_lq_exponent(initial.grid().dimension());
    evolve_with_lq(initial, d, cfg, sample_every, q)
}

/// [`evolve`] with an explicit norm exponent for the `lq` diagnostics.
pub fn evolve_with_lq(
    initial: &State,
    d: &DiffusionCoeffs,
    cfg: &IntegratorConfig,
    sample_every: f64,
    lq_exponent: f64,
) -> Result<TrajectoryRecord> {
    if !(sample_every > 0.0) {
        return Err(Error::param(format!(
            "sample_every must be positive, got {sample_every}"
        )));
    }
    let grid = initial.grid();
    let stencil = LaplacianStencil::new(grid);
    let initial_masses = masses_of(initial);
    let eq = compute_equilibrium(initial_masses, grid.domain().volume())?;

    let mut records = Vec::new();
    let mut state = initial.clone();
    records.push(diagnostics_record(&state, &eq, d, &stencil, lq_exponent)?);

    let mut next_sample = state.time() + sample_every;
    let t_end = cfg.t_end;
    while state.time() < t_end - 1e-12 * t_end.max(1.0) {
        let dt = cfg.dt_max.min(t_end - state.time());
        state = strang_step(&state, d, &stencil, cfg, dt)?;

        let drift = masses_of(&state).relative_drift(&initial_masses);
        if drift > MASS_DRIFT_LIMIT {
            return Err(Error::numerical(
                state.time(),
                format!("conserved totals drifted by {drift:.3e} (> {MASS_DRIFT_LIMIT:.0e})"),
            ));
        }

        let at_end = state.time() >= t_end - 1e-12 * t_end.max(1.0);
        if at_end || state.time() >= next_sample - 1e-12 {
            records.push(diagnostics_record(&state, &eq, d, &stencil, lq_exponent)?);
            while next_sample <= state.time() + 1e-12 {
                next_sample += sample_every;
            }
        }
    }
    Ok(TrajectoryRecord {
        records,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn degenerate_d() -> DiffusionCoeffs {
        DiffusionCoeffs::degenerate(1.0, 0.5, 2.0).unwrap()
    }

    fn cfg(dt_max: f64, t_end: f64) -> IntegratorConfig {
        IntegratorConfig::new(dt_max, 0.9, t_end, Splitting::Strang).unwrap()
    }

    #[test]
    fn rates_of_constant_states() {
        let grid = Grid::line(1.0, 4).unwrap();
        let s = State::constant(&grid, [1.0; 4], 0.0).unwrap();
        for f in reaction_rates(&s) {
            assert_eq!(f.linf_norm(), 0.0);
        }

        let s = State::constant(&grid, [2.0, 1.0, 1.0, 1.0], 0.0).unwrap();
        let r = reaction_rates(&s);
        for (i, expected) in [-1.0, -1.0, 1.0, 1.0].into_iter().enumerate() {
            for v in r[i].values() {
                assert_eq!(*v, expected);
            }
        }

        let s = State::constant(&grid, [1.0, 2.0, 3.0, 4.0], 0.0).unwrap();
        let r = reaction_rates(&s);
        for (i, expected) in [10.0, 10.0, -10.0, -10.0].into_iter().enumerate() {
            for v in r[i].values() {
                assert_eq!(*v, expected);
            }
        }
    }

    #[test]
    fn rates_cancel_bitwise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let grid = Grid::line(1.0, 16).unwrap();
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            Field::new(
                Arc::clone(&grid),
                (0..16).map(|_| rng.gen_range(0.0..3.0)).collect(),
            )
            .unwrap()
        };
        let s = State::new(mk(&mut rng), mk(&mut rng), mk(&mut rng), mk(&mut rng), 0.0).unwrap();
        let r = reaction_rates(&s);
        for c in 0..16 {
            assert_eq!(r[0].values()[c] + r[2].values()[c], 0.0);
            assert_eq!(r[0].values()[c] + r[3].values()[c], 0.0);
            assert_eq!(r[1].values()[c] + r[2].values()[c], 0.0);
            assert_eq!(r[0].values()[c] - r[1].values()[c], 0.0);
        }
    }

    #[test]
    fn reaction_dt_bound() {
        let grid = Grid::line(1.0, 4).unwrap();
        let s = State::constant(&grid, [2.0, 2.0, 2.0, 2.0], 0.0).unwrap();
        assert!((max_stable_reaction_dt(&s, 0.9) - 0.45).abs() < 1e-15);

        let zero = State::constant(&grid, [0.0; 4], 0.0).unwrap();
        let big = max_stable_reaction_dt(&zero, 1.0);
        assert!(big.is_finite() && big > 1e20);

        let s = State::constant(&grid, [1.0, 2.0, 3.0, 4.0], 0.0).unwrap();
        assert!((max_stable_reaction_dt(&s, 0.5) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn euler_substep_examples() {
        let grid = Grid::line(1.0, 4).unwrap();
        let eq = State::constant(&grid, [1.0; 4], 0.0).unwrap();
        let out = reaction_substep(&eq, 0.2).unwrap();
        for i in 0..4 {
            assert_eq!(out.component(i).values(), eq.component(i).values());
        }

        let s = State::constant(&grid, [2.0, 1.0, 1.0, 1.0], 0.0).unwrap();
        let out = reaction_substep(&s, 0.1).unwrap();
        for (i, expected) in [1.9, 0.9, 1.1, 1.1].into_iter().enumerate() {
            for v in out.component(i).values() {
                assert!((v - expected).abs() < 1e-15);
            }
        }

        // At the positivity bound the update lands exactly on zero.
        let s = State::constant(&grid, [1.0, 1.0, 0.0, 0.0], 0.0).unwrap();
        let out = reaction_substep(&s, 1.0).unwrap();
        for (i, expected) in [0.0, 0.0, 1.0, 1.0].into_iter().enumerate() {
            for v in out.component(i).values() {
                assert_eq!(*v, expected);
            }
        }

        assert!(reaction_substep(&s, 1.5).is_err());
    }

    #[test]
    fn substep_conserves_totals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let grid = Grid::line(1.0, 32).unwrap();
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            Field::new(
                Arc::clone(&grid),
                (0..32).map(|_| rng.gen_range(0.1..2.0)).collect(),
            )
            .unwrap()
        };
        for _ in 0..100 {
            let s =
                State::new(mk(&mut rng), mk(&mut rng), mk(&mut rng), mk(&mut rng), 0.0).unwrap();
            let dt = 0.9 * max_stable_reaction_dt(&s, 1.0);
            let out = reaction_substep(&s, dt).unwrap();
            assert!(masses_of(&out).relative_drift(&masses_of(&s)) <= 1e-13);
        }
    }

    #[test]
    fn equilibrium_constants_are_a_fixed_point() {
        let grid = Grid::line(1.0, 32).unwrap();
        let stencil = LaplacianStencil::new(&grid);
        let s = State::constant(&grid, [1.0; 4], 0.0).unwrap();
        let out = strang_step(&s, &degenerate_d(), &stencil, &cfg(0.01, 1.0), 0.01).unwrap();
        for i in 0..4 {
            for (a, b) in out
                .component(i)
                .values()
                .iter()
                .zip(s.component(i).values())
            {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_data_reduces_to_the_homogeneous_system() {
        // Diffusion acts trivially on constants, so the split step must agree
        // with a high-accuracy solve of the four-component system.
        let grid = Grid::line(1.0, 16).unwrap();
        let stencil = LaplacianStencil::new(&grid);
        let mut s = State::constant(&grid, [2.0, 1.0, 0.5, 1.5], 0.0).unwrap();
        let c = cfg(1e-3, 1.0);
        for _ in 0..1000 {
            s = strang_step(&s, &degenerate_d(), &stencil, &c, 1e-3).unwrap();
        }
        let oracle = crate::validation::oracles::rk4([2.0, 1.0, 0.5, 1.5], 1.0, 1e-6);
        for i in 0..4 {
            for v in s.component(i).values() {
                assert!(
                    (v - oracle[i]).abs() < 1e-7,
                    "component {i}: {v} vs oracle {}",
                    oracle[i]
                );
            }
        }
    }

    #[test]
    fn balanced_products_reduce_to_pure_heat_flow() {
        // With all four components equal, the reaction increment vanishes
        // bitwise and the step is exactly the composition of the two
        // half-step diffusion solves.
        let grid = Grid::line(1.0, 32).unwrap();
        let stencil = LaplacianStencil::new(&grid);
        let g = Field::from_fn(&grid, |x| 1.5 + 0.5 * (PI * x[0]).cos());
        let s = State::new(g.clone(), g.clone(), g.clone(), g.clone(), 0.0).unwrap();
        let d = DiffusionCoeffs::new(0.7, 0.7, 0.7, 0.7).unwrap();
        let dt = 0.05;
        let out = strang_step(&s, &d, &stencil, &cfg(dt, 1.0), dt).unwrap();
        let heat = stencil
            .implicit_diffusion_solve(
                &stencil.implicit_diffusion_solve(&g, 0.7, dt / 2.0).unwrap(),
                0.7,
                dt / 2.0,
            )
            .unwrap();
        for i in 0..4 {
            for (a, b) in out.component(i).values().iter().zip(heat.values()) {
                assert_eq!(*a, *b);
            }
        }
    }

    #[test]
    fn evolve_from_equilibrium_stays_flat() {
        let grid = Grid::line(1.0, 32).unwrap();
        let s = State::constant(&grid, [1.0; 4], 0.0).unwrap();
        let traj = evolve(&s, &degenerate_d(), &cfg(0.01, 1.0), 0.1).unwrap();
        for rec in &traj.records {
            assert!(rec.entropy <= 1e-12);
            assert!(rec.production <= 1e-10);
        }
    }

    #[test]
    fn evolve_constant_data_converges_to_shared_equilibrium() {
        let grid = Grid::line(1.0, 8).unwrap();
        let s = State::constant(&grid, [2.0, 2.0, 0.5, 0.5], 0.0).unwrap();
        let traj = evolve(&s, &degenerate_d(), &cfg(1e-3, 15.0), 0.5).unwrap();
        for i in 0..4 {
            let dist = traj
                .final_state
                .component(i)
                .values()
                .iter()
                .map(|v| (v - 1.25).abs())
                .fold(0.0, f64::max);
            assert!(dist < 1e-6, "component {i} at distance {dist}");
        }
    }

    #[test]
    fn entropy_decays_along_perturbed_trajectories() {
        let grid = Grid::line(1.0, 48).unwrap();
        let u1 = Field::from_fn(&grid, |x| (1.0 + 0.1 * (PI * x[0]).cos()).max(0.0));
        let ones = Field::constant(&grid, 1.0);
        let s = State::new(u1, ones.clone(), ones.clone(), ones.clone(), 0.0).unwrap();
        let traj = evolve(&s, &degenerate_d(), &cfg(2e-3, 12.0), 0.25).unwrap();
        let h0 = traj.records[0].entropy;
        for w in traj.records.windows(2) {
            assert!(w[1].entropy <= w[0].entropy + 1e-9 * h0);
        }
        let hend = traj.records.last().unwrap().entropy;
        assert!(hend < 1e-6 * h0, "H(end)/H(0) = {}", hend / h0);
    }

    #[test]
    fn sampling_times_start_at_zero_and_increase() {
        let grid = Grid::line(1.0, 8).unwrap();
        let s = State::constant(&grid, [1.0, 1.1, 0.9, 1.0], 0.0).unwrap();
        let traj = evolve(&s, &degenerate_d(), &cfg(0.01, 0.5), 0.1).unwrap();
        let times = traj.times();
        assert_eq!(times[0], 0.0);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert!((times.last().unwrap() - 0.5).abs() < 1e-9);
    }
}
