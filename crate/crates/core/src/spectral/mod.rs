//! Fast spectral evaluation of the hard-sphere Boltzmann collision operator.
//!
//! The physical velocity cube `[v_min, v_max]^3` is mapped linearly onto
//! `[-pi, pi)^3` and treated as periodic. The distribution is assumed to be
//! supported in the ball of radius `R = lambda pi`, `lambda = 2 / (3 + sqrt 2)`,
//! in those scaled coordinates; [`support_leakage`] measures how much mass
//! lies outside. Values returned by the operator are in physical units: the
//! scaled-coordinate result is multiplied by `s^4`, `s = (v_max - v_min) / 2 pi`,
//! the Jacobian of a kernel linear in the relative speed.

mod fft3;
mod kernel;
mod modes;
mod operator;
pub mod quadrature;

pub use fft3::Fft3;
pub use kernel::{precompute_kernel, AnglePair, SpectralKernel};
pub use modes::{forward_modes, mode_index, multi_index, wavenumber, ModeArray, ModeTransform};
pub use operator::{
    boltzmann_step, q_boltzmann_direct, q_boltzmann_fast, CollisionDiagnostics, SpectralWorkspace, DIRECT_COST_GUARD,
};

use std::f64::consts::PI;

use crate::error::{FksError, Result};
use crate::phase_space::VelocityGrid;

/// Support ratio `lambda = 2 / (3 + sqrt 2)`.
pub fn support_ratio() -> f64 {
    2.0 / (3.0 + std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    n_modes_per_axis: usize,
    a1: usize,
    a2: usize,
    c_alpha: f64,
    psi_order: usize,
}

impl SpectralConfig {
    pub const DEFAULT_ANGLES: usize = 4;

    pub fn new(n_modes_per_axis: usize, a1: usize, a2: usize) -> Result<Self> {
        if n_modes_per_axis < 2 || !n_modes_per_axis.is_multiple_of(2) {
            return Err(FksError::config(format!(
                "spectral mode count per axis must be even and >= 2, got {n_modes_per_axis}"
            )));
        }
        if a1 < 1 || a2 < 1 {
            return Err(FksError::config(format!(
                "angular counts must be >= 1, got A1 = {a1}, A2 = {a2}"
            )));
        }
        Ok(Self {
            n_modes_per_axis,
            a1,
            a2,
            c_alpha: 1.0,
            psi_order: quadrature::AngularProfile::DEFAULT_ORDER,
        })
    }

    pub fn with_c_alpha(mut self, c_alpha: f64) -> Result<Self> {
        if !(c_alpha > 0.0) || !c_alpha.is_finite() {
            return Err(FksError::config(format!("C_alpha must be positive, got {c_alpha}")));
        }
        self.c_alpha = c_alpha;
        Ok(self)
    }

    pub fn n_modes_per_axis(&self) -> usize {
        self.n_modes_per_axis
    }

    /// Padded transform size per axis that makes the quadratic products
    /// alias-free for the retained modes.
    pub fn padded_modes_per_axis(&self) -> usize {
        3 * self.n_modes_per_axis / 2
    }

    pub fn a1(&self) -> usize {
        self.a1
    }

    pub fn a2(&self) -> usize {
        self.a2
    }

    pub fn lambda(&self) -> f64 {
        support_ratio()
    }

    /// Cut-off radius `lambda pi` in scaled coordinates.
    pub fn radius(&self) -> f64 {
        support_ratio() * PI
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    pub fn psi_order(&self) -> usize {
        self.psi_order
    }

    pub fn check_grid(&self, vgrid: &VelocityGrid) -> Result<()> {
        if vgrid.n_per_axis() != self.n_modes_per_axis {
            return Err(FksError::Dimension(format!(
                "velocity grid has {} points per axis, spectral config {} modes",
                vgrid.n_per_axis(),
                self.n_modes_per_axis
            )));
        }
        Ok(())
    }

    /// `s^4` with `s` the physical-per-scaled velocity ratio.
    pub fn velocity_factor(&self, vgrid: &VelocityGrid) -> f64 {
        let s = (vgrid.v_max() - vgrid.v_min()) / (2.0 * PI);
        s.powi(4)
    }
}

/// Fraction of `sum |m_k|` carried by grid velocities outside the cut-off
/// ball once mapped to scaled coordinates.
pub fn support_leakage(masses: &[f64], vgrid: &VelocityGrid) -> f64 {
    let center = 0.5 * (vgrid.v_min() + vgrid.v_max());
    let scale = 2.0 * PI / (vgrid.v_max() - vgrid.v_min());
    let r2 = (support_ratio() * PI).powi(2);
    let mut outside = 0.0;
    let mut total = 0.0;
    for (m, v) in masses.iter().zip(vgrid.points()) {
        let xi: f64 = v.iter().map(|c| ((c - center) * scale).powi(2)).sum();
        total += m.abs();
        if xi > r2 {
            outside += m.abs();
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// Leakage above which a warning is emitted.
pub const SUPPORT_WARN_THRESHOLD: f64 = 1e-8;
