//! Domain decomposition, halo exchange and the multi-worker time loop.
//!
//! Every worker owns one equal cuboid block of the periodic spatial grid.
//! Per step it relaxes its cells, advances its own copy of the generic cell,
//! exchanges boundary masses of the escaped velocity slots with its
//! neighbors, then updates conservative variables and shifts masses.
//! Workers share nothing mutable; all data moves through a [`Transport`].

mod channel;
mod decomposition;
mod halo;
mod message;
mod runtime;
mod worker;

pub use channel::{ChannelTransport, DelayedTransport, Endpoint, Transport};
pub use decomposition::{build_decomposition, default_dims, directions, parse_dims, Decomposition, HaloSpec, Neighbor};
pub use halo::{HaloPlan, Route};
pub use message::{ExchangeMessage, SlotPayload};
pub use runtime::{run_workers, InitFn, RunOutput, RunSpec, Schedule};
pub use worker::{Collision, Routine, Shared, Worker, WorkerProfile};
