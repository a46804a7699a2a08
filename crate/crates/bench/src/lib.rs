//! Fixtures shared by the benchmarks.

use fks_core::phase_space::{discrete_maxwellian, Primitive, VelocityGrid};

/// Velocity grid on `[-15, 15]^3` as in the explosion benchmark.
pub fn velocity_grid(n: usize) -> VelocityGrid {
    VelocityGrid::new(n, -15.0, 15.0).expect("valid grid")
}

/// Slightly drifted hot equilibrium.
pub fn hot_state() -> Primitive {
    Primitive::new(1.0, [0.3, -0.1, 0.0], 5.0).expect("valid state")
}

pub fn hot_masses(vg: &VelocityGrid) -> Vec<f64> {
    discrete_maxwellian(&hot_state(), vg)
}
