//! Domain, grid, field and parameter types shared by every other module.
//!
//! Fields are cell averages on a uniform cell-centered mesh over an interval
//! or a rectangle. All quadrature is the midpoint/cell-average rule
//! `cell_volume * sum(values)`, which is exactly linear and makes the
//! conservation bookkeeping of the time integrator exact up to round-off.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Bounded interval `[0, lx]` or rectangle `[0, lx] x [0, ly]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    lengths: Vec<f64>,
    label: String,
}

impl DomainSpec {
    pub fn interval(length: f64) -> Result<Self> {
        Self::new(vec![length])
    }

    pub fn rectangle(lx: f64, ly: f64) -> Result<Self> {
        Self::new(vec![lx, ly])
    }

    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() || lengths.len() > 2 {
            return Err(Error::param(format!(
                "domain dimension must be 1 or 2, got {}",
                lengths.len()
            )));
        }
        if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::param(format!(
                "domain lengths must be positive and finite, got {lengths:?}"
            )));
        }
        Ok(DomainSpec {
            lengths,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// |Omega|, the measure of the domain.
    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Uniform cell-centered mesh on a [`DomainSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    domain: DomainSpec,
    cells: Vec<usize>,
    cell_volume: f64,
}

impl Grid {
    pub fn new(domain: DomainSpec, cells_per_axis: &[usize]) -> Result<Arc<Grid>> {
        if cells_per_axis.len() != domain.dimension() {
            return Err(Error::param(format!(
                "grid needs {} cell counts, got {}",
                domain.dimension(),
                cells_per_axis.len()
            )));
        }
        if cells_per_axis.contains(&0) {
            return Err(Error::param("cells per axis must be positive".to_string()));
        }
        let total: usize = cells_per_axis.iter().product();
        let cell_volume = domain.volume() / total as f64;
        Ok(Arc::new(Grid {
            domain,
            cells: cells_per_axis.to_vec(),
            cell_volume,
        }))
    }

    /// Convenience constructor for a 1D grid on `[0, length]`.
    pub fn line(length: f64, n: usize) -> Result<Arc<Grid>> {
        Grid::new(DomainSpec::interval(length)?, &[n])
    }

    /// Convenience constructor for a 2D grid on `[0, lx] x [0, ly]`.
    pub fn rect(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Arc<Grid>> {
        Grid::new(DomainSpec::rectangle(lx, ly)?, &[nx, ny])
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Mesh width along one axis.
    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.lengths()[axis] / self.cells[axis] as f64
    }

    /// Coordinates of the center of the cell with the given flat index.
    /// Flat indices run x-fastest: `idx = iy * nx + ix`.
    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        match self.dimension() {
            1 => {
                let h = self.spacing(0);
                vec![(idx as f64 + 0.5) * h]
            }
            _ => {
                let nx = self.cells[0];
                let (ix, iy) = (idx % nx, idx / nx);
                vec![
                    (ix as f64 + 0.5) * self.spacing(0),
                    (iy as f64 + 0.5) * self.spacing(1),
                ]
            }
        }
    }
}

/// One scalar concentration stored as cell averages on a shared [`Grid`].
///
/// Values may be negative: the diagnostics evaluate signed intermediates such
/// as deviations from a spatial average. Nonnegativity is enforced at the
/// [`State`] level instead.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.num_cells() {
            return Err(Error::GridMismatch(format!(
                "field has {} values for a grid of {} cells",
                values.len(),
                grid.num_cells()
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Field {
        Field {
            grid: Arc::clone(grid),
            values: vec![value; grid.num_cells()],
        }
    }

    /// Builds a field by evaluating `f` at every cell center.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Field {
        let values = (0..grid.num_cells())
            .map(|idx| f(&grid.cell_center(idx)))
            .collect();
        Field {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Cell-average quadrature `cell_volume * sum(values)`.
    pub fn integrate(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    /// Spatial average `integrate / |Omega|`.
    pub fn average(&self) -> f64 {
        self.integrate() / self.grid.domain().volume()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discrete sup norm `max |v|`.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Volume-weighted `L^p` norm `(cell_volume * sum |v|^p)^(1/p)`, `p >= 1`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::param(format!("lp_norm requires p >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.linf_norm());
        }
        let cv = self.grid.cell_volume();
        if (p - 1.0).abs() < 1e-15 {
            return Ok(cv * self.values.iter().map(|v| v.abs()).sum::<f64>());
        }
        if (p - 2.0).abs() < 1e-15 {
            return Ok((cv * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt());
        }
        Ok((cv * self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p))
    }

    /// Cellwise square root; well defined for nonnegative fields.
    pub fn sqrt(&self) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v.sqrt()).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Checked cell-average quadrature of `f` over `grid`.
pub fn integrate(grid: &Grid, f: &Field) -> Result<f64> {
    if *f.grid().as_ref() != *grid {
        return Err(Error::GridMismatch(
            "integrate called with a field from a different grid".to_string(),
        ));
    }
    Ok(f.integrate())
}

/// The four concentrations at one instant, on one shared grid.
#[derive(Clone, Debug)]
pub struct State {
    fields: [Field; 4],
    time: f64,
}

impl State {
    pub fn new(u1: Field, u2: Field, u3: Field, u4: Field, time: f64) -> Result<State> {
        let fields = [u1, u2, u3, u4];
        for (i, f) in fields.iter().enumerate().skip(1) {
            if !fields[0].same_grid(f) {
                return Err(Error::GridMismatch(format!(
                    "state component {} lives on a different grid",
                    i + 1
                )));
            }
        }
        for (i, f) in fields.iter().enumerate() {
            for (c, &v) in f.values().iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::param(format!(
                        "state component {} has value {v} in cell {c}; \
                         concentrations must be finite and nonnegative",
                        i + 1
                    )));
                }
            }
        }
        if !(time >= 0.0) {
            return Err(Error::param(format!("state time must be >= 0, got {time}")));
        }
        Ok(State { fields, time })
    }

    /// Spatially constant state from four values.
    pub fn constant(grid: &Arc<Grid>, values: [f64; 4], time: f64) -> Result<State> {
        let [a, b, c, d] = values;
        State::new(
            Field::constant(grid, a),
            Field::constant(grid, b),
            Field::constant(grid, c),
            Field::constant(grid, d),
            time,
        )
    }

    pub(crate) fn from_fields_unchecked(fields: [Field; 4], time: f64) -> State {
        State { fields, time }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.fields[0].grid()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    /// Species component, `i` in `0..4`.
    pub fn component(&self, i: usize) -> &Field {
        &self.fields[i]
    }

    pub(crate) fn component_mut(&mut self, i: usize) -> &mut Field {
        &mut self.fields[i]
    }

    pub fn components(&self) -> &[Field; 4] {
        &self.fields
    }

    pub fn u1(&self) -> &Field {
        &self.fields[0]
    }
    pub fn u2(&self) -> &Field {
        &self.fields[1]
    }
    pub fn u3(&self) -> &Field {
        &self.fields[2]
    }
    pub fn u4(&self) -> &Field {
        &self.fields[3]
    }

    /// Smallest cell value over all four components.
    pub fn min_value(&self) -> f64 {
        self.fields
            .iter()
            .map(Field::min_value)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest sup norm over the four components.
    pub fn max_sup(&self) -> f64 {
        self.fields.iter().map(Field::linf_norm).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.fields.iter().all(Field::is_finite)
    }
}

/// Diffusion coefficients; `d4 = 0` selects the degenerate system in which
/// the fourth species does not diffuse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionCoeffs {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

impl DiffusionCoeffs {
    pub fn new(d1: f64, d2: f64, d3: f64, d4: f64) -> Result<DiffusionCoeffs> {
        for (name, d) in [("d1", d1), ("d2", d2), ("d3", d3)] {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::param(format!("diffusion.{name} must be positive")));
            }
        }
        if !(d4 >= 0.0) || !d4.is_finite() {
            return Err(Error::param("diffusion.d4 must be nonnegative".to_string()));
        }
        Ok(DiffusionCoeffs { d1, d2, d3, d4 })
    }

    /// Degenerate system: the fourth species has no self diffusion.
    pub fn degenerate(d1: f64, d2: f64, d3: f64) -> Result<DiffusionCoeffs> {
        DiffusionCoeffs::new(d1, d2, d3, 0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        [self.d1, self.d2, self.d3, self.d4][i]
    }
}

/// The three independent conserved totals; the fourth is linearly dependent
/// and always reported as `m24 = m14 + m23 - m13`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Masses {
    m13: f64,
    m14: f64,
    m23: f64,
}

impl Masses {
    pub fn new(m13: f64, m14: f64, m23: f64) -> Result<Masses> {
        for (name, m) in [("m13", m13), ("m14", m14), ("m23", m23)] {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::param(format!("masses.{name} must be positive")));
            }
        }
        Ok(Masses { m13, m14, m23 })
    }

    pub(crate) fn from_integrals(m13: f64, m14: f64, m23: f64) -> Masses {
        Masses { m13, m14, m23 }
    }

    pub fn m13(&self) -> f64 {
        self.m13
    }
    pub fn m14(&self) -> f64 {
        self.m14
    }
    pub fn m23(&self) -> f64 {
        self.m23
    }

    /// Derived fourth total, exact by construction.
    pub fn m24(&self) -> f64 {
        self.m14 + self.m23 - self.m13
    }

    /// Largest relative deviation between two mass records.
    pub fn relative_drift(&self, other: &Masses) -> f64 {
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-300);
        rel(self.m13, other.m13)
            .max(rel(self.m14, other.m14))
            .max(rel(self.m23, other.m23))
    }
}

/// Conserved totals of a state: `m_ij = integral(u_i + u_j)`.
pub fn masses_of(state: &State) -> Masses {
    let m = [
        state.u1().integrate(),
        state.u2().integrate(),
        state.u3().integrate(),
        state.u4().integrate(),
    ];
    Masses::from_integrals(m[0] + m[2], m[0] + m[3], m[1] + m[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_line(n: usize) -> Arc<Grid> {
        Grid::line(1.0, n).unwrap()
    }

    #[test]
    fn cell_volume_times_count_is_domain_volume() {
        let g = Grid::rect(2.0, 1.0, 40, 17).unwrap();
        let recon = g.cell_volume() * g.num_cells() as f64;
        assert!((recon - 2.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn integrate_constant_field() {
        let g = unit_line(10);
        let f = Field::constant(&g, 3.0);
        assert!((integrate(&g, &f).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_zero_field_2d() {
        let g = Grid::rect(2.0, 1.0, 13, 7).unwrap();
        let f = Field::constant(&g, 0.0);
        assert_eq!(integrate(&g, &f).unwrap(), 0.0);
    }

    #[test]
    fn midpoint_rule_exact_for_affine_integrand() {
        // Cell averages of x on [0,1] coincide with cell-center values, and
        // the quadrature reproduces the exact integral 1/2.
        let g = unit_line(128);
        let centers = Field::from_fn(&g, |x| x[0]);
        let h = g.spacing(0);
        let symbolic = Field::new(
            Arc::clone(&g),
            (0..128)
                .map(|i| {
                    let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                    (b * b - a * a) / (2.0 * h)
                })
                .collect(),
        )
        .unwrap();
        for (c, s) in centers.values().iter().zip(symbolic.values()) {
            assert!((c - s).abs() < 1e-15);
        }
        assert!((centers.integrate() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn integrate_rejects_foreign_grid() {
        let g = unit_line(8);
        let other = unit_line(9);
        let f = Field::constant(&other, 1.0);
        assert!(matches!(integrate(&g, &f), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn masses_of_constant_states() {
        let g = unit_line(16);
        let s = State::constant(&g, [1.0, 1.0, 1.0, 1.0], 0.0).unwrap();
        let m = masses_of(&s);
        assert!((m.m13() - 2.0).abs() < 1e-13);
        assert!((m.m14() - 2.0).abs() < 1e-13);
        assert!((m.m23() - 2.0).abs() < 1e-13);
        assert!((m.m24() - 2.0).abs() < 1e-13);

        let s = State::constant(&g, [2.0, 1.0, 1.0, 1.0], 0.0).unwrap();
        let m = masses_of(&s);
        assert!((m.m13() - 3.0).abs() < 1e-13);
        assert!((m.m14() - 3.0).abs() < 1e-13);
        assert!((m.m23() - 2.0).abs() < 1e-13);
        assert!((m.m24() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn masses_of_on_volume_two() {
        let g = Grid::line(2.0, 64).unwrap();
        let s = State::constant(&g, [1.0, 2.0, 3.0, 4.0], 0.0).unwrap();
        let m = masses_of(&s);
        assert!((m.m13() - 8.0).abs() < 1e-12);
        assert!((m.m14() - 10.0).abs() < 1e-12);
        assert!((m.m23() - 10.0).abs() < 1e-12);
        assert!((m.m24() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn norms_match_hand_values() {
        let g = unit_line(5);
        let f = Field::constant(&g, -1.5);
        assert!((f.lp_norm(3.0).unwrap() - 1.5).abs() < 1e-13);
        assert!((f.linf_norm() - 1.5).abs() < 1e-15);

        let g4 = Grid::line(4.0, 8).unwrap();
        let f = Field::constant(&g4, 2.0);
        assert!((f.lp_norm(2.0).unwrap() - 4.0).abs() < 1e-13);

        let g2 = unit_line(2);
        let f = Field::new(Arc::clone(&g2), vec![3.0, -1.0]).unwrap();
        assert_eq!(f.linf_norm(), 3.0);
    }

    #[test]
    fn lp_norm_rejects_p_below_one() {
        let g = unit_line(4);
        let f = Field::constant(&g, 1.0);
        assert!(f.lp_norm(0.5).is_err());
    }

    #[test]
    fn state_rejects_negative_and_mismatched() {
        let g = unit_line(4);
        let bad = Field::new(Arc::clone(&g), vec![1.0, -0.1, 0.0, 2.0]).unwrap();
        let ok = Field::constant(&g, 1.0);
        assert!(State::new(bad, ok.clone(), ok.clone(), ok.clone(), 0.0).is_err());

        let other = unit_line(5);
        let foreign = Field::constant(&other, 1.0);
        assert!(State::new(ok.clone(), ok.clone(), ok.clone(), foreign, 0.0).is_err());
    }

    #[test]
    fn diffusion_coeffs_validation() {
        assert!(DiffusionCoeffs::new(1.0, 1.0, 1.0, 0.0).is_ok());
        assert!(DiffusionCoeffs::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(DiffusionCoeffs::new(1.0, 1.0, 1.0, -0.5).is_err());
    }

    proptest! {
        #[test]
        fn integrate_is_linear(
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
            fv in prop::collection::vec(-10.0f64..10.0, 32),
            gv in prop::collection::vec(-10.0f64..10.0, 32),
        ) {
            let grid = unit_line(32);
            let f = Field::new(Arc::clone(&grid), fv.clone()).unwrap();
            let g = Field::new(Arc::clone(&grid), gv.clone()).unwrap();
            let combo = Field::new(
                Arc::clone(&grid),
                fv.iter().zip(&gv).map(|(x, y)| a * x + b * y).collect(),
            )
            .unwrap();
            let lhs = combo.integrate();
            let rhs = a * f.integrate() + b * g.integrate();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-13 * scale);
        }

        #[test]
        fn lp_norm_homogeneous_and_monotone(
            k in 0.0f64..7.0,
            p in 1.0f64..6.0,
            fv in prop::collection::vec(-4.0f64..4.0, 24),
        ) {
            let grid = unit_line(24);
            let f = Field::new(Arc::clone(&grid), fv.clone()).unwrap();
            let kf = Field::new(Arc::clone(&grid), fv.iter().map(|v| k * v).collect()).unwrap();
            let n = f.lp_norm(p).unwrap();
            let kn = kf.lp_norm(p).unwrap();
            prop_assert!((kn - k * n).abs() <= 1e-12 * (1.0 + kn.abs()));

            // Growing |values| cellwise cannot shrink the norm.
            let bigger = Field::new(
                Arc::clone(&grid),
                fv.iter().map(|v| v.abs() + 1.0).collect(),
            )
            .unwrap();
            prop_assert!(bigger.lp_norm(p).unwrap() + 1e-12 >= n);
        }

        #[test]
        fn dependent_mass_identity(
            v1 in prop::collection::vec(0.0f64..5.0, 16),
            v2 in prop::collection::vec(0.0f64..5.0, 16),
            v3 in prop::collection::vec(0.0f64..5.0, 16),
            v4 in prop::collection::vec(0.0f64..5.0, 16),
        ) {
            let grid = unit_line(16);
            let s = State::new(
                Field::new(Arc::clone(&grid), v1).unwrap(),
                Field::new(Arc::clone(&grid), v2).unwrap(),
                Field::new(Arc::clone(&grid), v3).unwrap(),
                Field::new(Arc::clone(&grid), v4).unwrap(),
                0.0,
            )
            .unwrap();
            let m = masses_of(&s);
            let direct = s.u2().integrate() + s.u4().integrate();
            prop_assert!((m.m24() - direct).abs() <= 1e-13 * (1.0 + direct.abs()));
        }
    }
}
