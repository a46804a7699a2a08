//! Fast Kinetic Scheme solver for 3D x 3D kinetic equations.
//!
//! Exact semi-Lagrangian transport on a discrete velocity grid, BGK or
//! spectral Boltzmann collisions per cell, and a domain-decomposed worker
//! runtime with ghost exchange.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod bgk;
pub mod error;
pub mod parallel;
pub mod phase_space;
pub mod spectral;
pub mod transport;

pub use app::{run_simulation, CollisionKind, InitKind, ProfileReport, RunConfig, Simulation, Stop};
pub use bgk::BgkParams;
pub use error::{FksError, Result};
pub use parallel::{build_decomposition, Decomposition, Routine, Schedule};
pub use phase_space::{Conserved, ConservedField, MassField, Primitive, SpatialGrid, VelocityGrid};
pub use spectral::{precompute_kernel, SpectralConfig, SpectralKernel};
pub use transport::StopRule;
