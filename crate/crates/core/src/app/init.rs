use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::InitKind;
use crate::phase_space::{
    cell_moments, fill_discrete_maxwellian, ConservedField, MassField, Primitive, SpatialGrid, VelocityGrid,
};

pub const SOD_CENTER: [f64; 3] = [1.0, 1.0, 1.0];
pub const SOD_RADIUS: f64 = 0.2;

pub fn sod_left() -> Primitive {
    Primitive {
        rho: 1.0,
        u: [0.0; 3],
        temperature: 5.0,
    }
}

pub fn sod_right() -> Primitive {
    Primitive {
        rho: 0.125,
        u: [0.0; 3],
        temperature: 4.0,
    }
}

/// Left state strictly inside the ball, right state elsewhere.
pub fn sod_state(center: [f64; 3]) -> Primitive {
    let r2: f64 = (0..3).map(|a| (center[a] - SOD_CENTER[a]).powi(2)).sum();
    if r2 < SOD_RADIUS * SOD_RADIUS {
        sod_left()
    } else {
        sod_right()
    }
}

/// Equilibrium state of a global cell for the given initial condition.
pub fn initial_state(kind: InitKind, sgrid: &SpatialGrid, cell: [usize; 3], seed: u64) -> Primitive {
    match kind {
        InitKind::Sod => sod_state(sgrid.center(cell[0], cell[1], cell[2])),
        InitKind::Uniform => sod_right(),
        InitKind::Random => {
            // one stream per cell so the draw does not depend on block layout
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(sgrid.index(cell[0], cell[1], cell[2]) as u64);
            Primitive {
                rho: rng.random_range(0.5..1.5),
                u: [0; 3].map(|_| rng.random_range(-0.5..0.5)),
                temperature: rng.random_range(3.0..6.0),
            }
        }
    }
}

/// Per-cell mass initializer for the worker runtime.
pub fn initializer<'a>(
    kind: InitKind,
    sgrid: &'a SpatialGrid,
    vgrid: &'a VelocityGrid,
    seed: u64,
) -> impl Fn([usize; 3], &mut [f64]) + Sync + 'a {
    move |cell, out| fill_discrete_maxwellian(&initial_state(kind, sgrid, cell, seed), vgrid, out)
}

pub fn init_sod_explosion(sgrid: &SpatialGrid, vgrid: &VelocityGrid) -> (MassField, ConservedField) {
    let n = sgrid.n_per_axis();
    let mut masses = MassField::zeros(sgrid.len(), vgrid.len());
    let fill = initializer(InitKind::Sod, sgrid, vgrid, 0);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                fill([i, j, k], masses.cell_mut(sgrid.index(i, j, k)));
            }
        }
    }
    let conserved = ConservedField::new(masses.cells().map(|m| cell_moments(m, vgrid)).collect());
    (masses, conserved)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_center_and_corner() {
        assert_eq!(sod_state([1.0, 1.0, 1.0]), sod_left());
        assert_eq!(sod_state([0.0, 0.0, 0.0]), sod_right());
        assert_eq!(sod_state([1.25, 1.0, 1.0]), sod_right());
        assert_eq!(sod_state([1.0, 0.85, 1.0]), sod_left());
    }

    #[test]
    fn random_state_is_per_cell() {
        let g = SpatialGrid::new(4, 0.0, 1.0).unwrap();
        let a = initial_state(InitKind::Random, &g, [1, 2, 3], 7);
        assert_eq!(a, initial_state(InitKind::Random, &g, [1, 2, 3], 7));
        assert_ne!(a, initial_state(InitKind::Random, &g, [2, 2, 3], 7));
        assert_ne!(a, initial_state(InitKind::Random, &g, [1, 2, 3], 8));
    }
}
