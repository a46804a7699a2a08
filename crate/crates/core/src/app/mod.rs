//! Configuration, initial states, the run driver, profiling and outputs.

mod config;
mod init;
mod output;
mod run;
mod scaling;

pub use config::{CollisionKind, InitKind, RunConfig, Stop, KEYS};
pub use init::{
    init_sod_explosion, initial_state, initializer, sod_left, sod_right, sod_state, SOD_CENTER, SOD_RADIUS,
};
pub use output::{
    decode_dump, diagonal_csv, emit_outputs, encode_dump, profile_text, read_dump, OutputPaths, DUMP_HEADER_BYTES,
};
pub use run::{grids, run_simulation, run_simulation_with, time_plan, ProfileReport, Simulation};
pub use scaling::{scaling_benchmark, speedup_efficiency, ScalingRow, ScalingTable};
