//! Phase-space grids, the discrete distribution function, moments and the
//! Maxwellian.
//!
//! Velocity points are cell-centred, `v = v_min + (k + 1/2) dv` on every
//! axis, so a symmetric interval with an even point count is symmetric
//! about zero. Flattened indices are x-fastest everywhere in this crate.

use std::f64::consts::PI;

use crate::error::{FksError, Result};

/// Uniform cubic velocity grid with `n_per_axis^3` points.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    n_per_axis: usize,
    v_min: f64,
    v_max: f64,
    dv: f64,
    points: Vec<[f64; 3]>,
}

impl VelocityGrid {
    pub fn new(n_per_axis: usize, v_min: f64, v_max: f64) -> Result<Self> {
        if n_per_axis < 2 {
            return Err(FksError::config(format!(
                "velocity grid needs at least 2 points per axis, got {n_per_axis}"
            )));
        }
        if !(v_max > v_min) || !v_min.is_finite() || !v_max.is_finite() {
            return Err(FksError::config(format!(
                "velocity bounds must satisfy v_min < v_max, got [{v_min}, {v_max}]"
            )));
        }
        let dv = (v_max - v_min) / n_per_axis as f64;
        let axis: Vec<f64> = (0..n_per_axis).map(|k| v_min + (k as f64 + 0.5) * dv).collect();
        let mut points = Vec::with_capacity(n_per_axis.pow(3));
        for &vz in &axis {
            for &vy in &axis {
                for &vx in &axis {
                    points.push([vx, vy, vz]);
                }
            }
        }
        Ok(Self {
            n_per_axis,
            v_min,
            v_max,
            dv,
            points,
        })
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    /// Total number of discrete velocities `N_v`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn dv(&self) -> f64 {
        self.dv
    }

    /// Volume element `dv^3` used in every moment sum.
    pub fn cell_volume(&self) -> f64 {
        self.dv * self.dv * self.dv
    }

    pub fn axis_point(&self, k: usize) -> f64 {
        self.v_min + (k as f64 + 0.5) * self.dv
    }

    pub fn point(&self, k: usize) -> [f64; 3] {
        self.points[k]
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    /// Largest speed along any single axis admitted by the velocity bounds.
    pub fn max_axis_speed(&self) -> f64 {
        self.v_min.abs().max(self.v_max.abs())
    }

    /// Flat index of the point with per-axis indices `(i, j, k)`.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n_per_axis * (j + self.n_per_axis * k)
    }
}

/// Uniform cubic spatial grid of `n_per_axis^3` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    n_per_axis: usize,
    x_min: f64,
    x_max: f64,
    dx: f64,
}

impl SpatialGrid {
    pub fn new(n_per_axis: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_per_axis == 0 {
            return Err(FksError::config("spatial grid needs at least one cell"));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(FksError::config(format!(
                "spatial bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            n_per_axis,
            x_min,
            x_max,
            dx: (x_max - x_min) / n_per_axis as f64,
        })
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    /// Total number of cells `N_s`.
    pub fn len(&self) -> usize {
        self.n_per_axis.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        self.n_per_axis == 0
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn center_1d(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.center_1d(i), self.center_1d(j), self.center_1d(k)]
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n_per_axis * (j + self.n_per_axis * k)
    }
}

/// Particle masses for every (cell, velocity) pair, velocity-fastest so that
/// the masses of one cell are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct MassField {
    n_cells: usize,
    n_velocities: usize,
    data: Vec<f64>,
}

impl MassField {
    pub fn zeros(n_cells: usize, n_velocities: usize) -> Self {
        Self {
            n_cells,
            n_velocities,
            data: vec![0.0; n_cells * n_velocities],
        }
    }

    pub fn from_vec(n_cells: usize, n_velocities: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_cells * n_velocities {
            return Err(FksError::Dimension(format!(
                "mass field of {n_cells} cells x {n_velocities} velocities needs {} values, got {}",
                n_cells * n_velocities,
                data.len()
            )));
        }
        Ok(Self {
            n_cells,
            n_velocities,
            data,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_velocities(&self) -> usize {
        self.n_velocities
    }

    pub fn cell(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_velocities..(j + 1) * self.n_velocities]
    }

    pub fn cell_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.n_velocities..(j + 1) * self.n_velocities]
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.data[j * self.n_velocities + k]
    }

    pub fn set(&mut self, j: usize, k: usize, value: f64) {
        self.data[j * self.n_velocities + k] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn cells(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_velocities)
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|m| !m.is_finite())
            .map(|p| (p / self.n_velocities, p % self.n_velocities))
    }
}

/// Conservative variables `(rho, rho u, E)` of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved {
    pub rho: f64,
    pub mom: [f64; 3],
    pub energy: f64,
}

impl Conserved {
    pub const ZERO: Conserved = Conserved {
        rho: 0.0,
        mom: [0.0; 3],
        energy: 0.0,
    };

    pub fn as_array(&self) -> [f64; 5] {
        [self.rho, self.mom[0], self.mom[1], self.mom[2], self.energy]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self {
            rho: a[0],
            mom: [a[1], a[2], a[3]],
            energy: a[4],
        }
    }

    pub fn max_abs_diff(&self, other: &Conserved) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-cell conservative variables, cell-major x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedField {
    cells: Vec<Conserved>,
}

impl ConservedField {
    pub fn new(cells: Vec<Conserved>) -> Self {
        Self { cells }
    }

    pub fn zeros(n_cells: usize) -> Self {
        Self {
            cells: vec![Conserved::ZERO; n_cells],
        }
    }

    /// Moments of every cell of `masses`.
    pub fn from_masses(masses: &MassField, vgrid: &VelocityGrid) -> Self {
        Self {
            cells: masses.cells().map(|m| cell_moments(m, vgrid)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Conserved] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [Conserved] {
        &mut self.cells
    }

    /// Componentwise sum over all cells, in cell order.
    pub fn total(&self) -> Conserved {
        let mut acc = [0.0; 5];
        for c in &self.cells {
            for (a, v) in acc.iter_mut().zip(c.as_array()) {
                *a += v;
            }
        }
        Conserved::from_array(acc)
    }

    pub fn max_abs_diff(&self, other: &ConservedField) -> f64 {
        assert_eq!(self.len(), other.len(), "conserved fields differ in size");
        self.cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Primitive state `(rho, u, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: [f64; 3],
    pub temperature: f64,
}

impl Primitive {
    pub fn new(rho: f64, u: [f64; 3], temperature: f64) -> Result<Self> {
        let p = Self { rho, u, temperature };
        p.validate(0)?;
        Ok(p)
    }

    fn validate(&self, cell: usize) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(FksError::InvalidState {
                cell,
                reason: format!("non-positive density {}", self.rho),
            });
        }
        if !(self.temperature > 0.0) {
            return Err(FksError::InvalidState {
                cell,
                reason: format!("non-positive temperature {}", self.temperature),
            });
        }
        Ok(())
    }

    pub fn to_conserved(&self) -> Conserved {
        let u2 = dot(self.u, self.u);
        Conserved {
            rho: self.rho,
            mom: self.u.map(|c| self.rho * c),
            energy: 1.5 * self.rho * self.temperature + 0.5 * self.rho * u2,
        }
    }
}

#[inline]
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Moments `(rho, mom, E)` of one cell's masses, summed left to right over `k`.
pub fn cell_moments(masses: &[f64], vgrid: &VelocityGrid) -> Conserved {
    debug_assert_eq!(masses.len(), vgrid.len());
    let mut rho = 0.0;
    let mut mom = [0.0; 3];
    let mut energy = 0.0;
    for (m, v) in masses.iter().zip(vgrid.points()) {
        rho += m;
        mom[0] += v[0] * m;
        mom[1] += v[1] * m;
        mom[2] += v[2] * m;
        energy += 0.5 * dot(*v, *v) * m;
    }
    let w = vgrid.cell_volume();
    Conserved {
        rho: rho * w,
        mom: mom.map(|c| c * w),
        energy: energy * w,
    }
}

/// Converts conservative variables to `(rho, u, T)`; `cell` tags the error.
pub fn primitive_from_conserved(u: &Conserved, cell: usize) -> Result<Primitive> {
    if !(u.rho > 0.0) {
        return Err(FksError::InvalidState {
            cell,
            reason: format!("non-positive density {}", u.rho),
        });
    }
    let vel = u.mom.map(|c| c / u.rho);
    let kinetic = 0.5 * u.rho * dot(vel, vel);
    let temperature = (u.energy - kinetic) * 2.0 / (3.0 * u.rho);
    let p = Primitive {
        rho: u.rho,
        u: vel,
        temperature,
    };
    p.validate(cell)?;
    Ok(p)
}

pub fn conserved_from_primitive(p: &Primitive) -> Conserved {
    p.to_conserved()
}

/// Local Maxwellian `rho / (2 pi T)^{3/2} exp(-|u - v|^2 / (2T))`.
pub fn maxwellian(p: &Primitive, v: [f64; 3]) -> f64 {
    let d = [v[0] - p.u[0], v[1] - p.u[1], v[2] - p.u[2]];
    maxwellian_prefactor(p) * (-dot(d, d) / (2.0 * p.temperature)).exp()
}

#[inline]
pub(crate) fn maxwellian_prefactor(p: &Primitive) -> f64 {
    p.rho / (2.0 * PI * p.temperature).powf(1.5)
}

/// Pointwise Maxwellian on every grid velocity, no moment correction.
pub fn discrete_maxwellian(p: &Primitive, vgrid: &VelocityGrid) -> Vec<f64> {
    let mut out = vec![0.0; vgrid.len()];
    fill_discrete_maxwellian(p, vgrid, &mut out);
    out
}

pub fn fill_discrete_maxwellian(p: &Primitive, vgrid: &VelocityGrid, out: &mut [f64]) {
    let pre = maxwellian_prefactor(p);
    let inv = -1.0 / (2.0 * p.temperature);
    for (o, v) in out.iter_mut().zip(vgrid.points()) {
        let d = [v[0] - p.u[0], v[1] - p.u[1], v[2] - p.u[2]];
        *o = pre * (dot(d, d) * inv).exp();
    }
}
