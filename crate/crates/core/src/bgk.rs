//! BGK relaxation towards the local Maxwellian, explicit Euler in time.

use crate::error::{FksError, Result};
use crate::phase_space::{fill_discrete_maxwellian, Primitive, VelocityGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BgkParams {
    tau: f64,
}

impl BgkParams {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(FksError::config(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Collision frequency, constant `1 / tau`.
    pub fn nu(&self) -> f64 {
        1.0 / self.tau
    }
}

/// Outcome flags of one relaxation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BgkStatus {
    /// `dt * nu > 1`: explicit Euler overshoots the equilibrium.
    pub overshoot: bool,
}

/// `m_k <- m_k + dt nu (E_k - m_k)` with `E` the discrete Maxwellian of
/// `prim`. `prim` must come from the transported conservative variables of
/// the cell, never from `masses`.
pub fn bgk_step(
    masses: &mut [f64],
    prim: &Primitive,
    params: &BgkParams,
    dt: f64,
    vgrid: &VelocityGrid,
    scratch: &mut Vec<f64>,
) -> BgkStatus {
    scratch.resize(vgrid.len(), 0.0);
    fill_discrete_maxwellian(prim, vgrid, scratch);
    let rate = dt * params.nu();
    if rate == 1.0 {
        masses.copy_from_slice(scratch);
    } else {
        for (m, e) in masses.iter_mut().zip(scratch.iter()) {
            *m += rate * (e - *m);
        }
    }
    BgkStatus { overshoot: rate > 1.0 }
}
