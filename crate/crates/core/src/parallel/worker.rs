use std::sync::Arc;
use std::time::Instant;

use super::channel::Endpoint;
use super::decomposition::Decomposition;
use super::halo::HaloPlan;
use super::message::ExchangeMessage;
use crate::bgk::{bgk_step, BgkParams};
use crate::error::{FksError, Result};
use crate::phase_space::{cell_moments, primitive_from_conserved, Conserved, Primitive, VelocityGrid};
use crate::spectral::{SpectralConfig, SpectralKernel, SpectralWorkspace};
use crate::transport::{advance_generic_cell, update_and_shift, BlockField, EscapeList, GenericCell, GhostStatus};

/// Collision operator applied per cell.
#[derive(Debug, Clone)]
pub enum Collision {
    None,
    Bgk(BgkParams),
    Boltzmann {
        config: SpectralConfig,
        kernel: Arc<SpectralKernel>,
    },
}

impl Collision {
    pub fn name(&self) -> &'static str {
        match self {
            Collision::None => "none",
            Collision::Bgk(_) => "bgk",
            Collision::Boltzmann { .. } => "boltzmann",
        }
    }
}

/// Profiled phases of one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Routine {
    Transport,
    ToConservative,
    ToPrimitive,
    Collision,
    Communication,
}

impl Routine {
    pub const ALL: [Routine; 5] = [
        Routine::Transport,
        Routine::ToConservative,
        Routine::ToPrimitive,
        Routine::Collision,
        Routine::Communication,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Routine::Transport => "Transport",
            Routine::ToConservative => "ToConservative",
            Routine::ToPrimitive => "ToPrimitive",
            Routine::Collision => "Collision",
            Routine::Communication => "Communication",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Wall time and traffic of one worker.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorkerProfile {
    pub seconds: [f64; 5],
    /// Time inside the step functions, attributed or not.
    pub total: f64,
    pub steps: usize,
    pub cells: usize,
    pub messages_sent: usize,
    pub values_sent: usize,
    pub values_received: usize,
    pub bgk_overshoot_steps: usize,
    pub max_imag_residue: f64,
    pub transforms: u64,
}

impl WorkerProfile {
    pub fn get(&self, r: Routine) -> f64 {
        self.seconds[r.slot()]
    }

    fn add(&mut self, r: Routine, since: Instant) -> Instant {
        let now = Instant::now();
        self.seconds[r.slot()] += (now - since).as_secs_f64();
        now
    }
}

/// Static data shared by all workers of a run.
#[derive(Debug)]
pub struct Shared {
    pub decomposition: Decomposition,
    pub plan: HaloPlan,
    pub vgrid: VelocityGrid,
    pub dx: f64,
    pub collision: Collision,
}

/// One spatial block and its time-stepping state.
pub struct Worker {
    rank: usize,
    shared: Arc<Shared>,
    endpoint: Box<dyn Endpoint>,
    field: BlockField,
    conserved: Vec<Conserved>,
    cell: GenericCell,
    ghosts: GhostStatus,
    escapes: EscapeList,
    step: u64,
    // (send to, receive from) per direction
    peers: Vec<(usize, usize)>,
    spectral: Option<SpectralWorkspace>,
    scratch: Vec<f64>,
    prims: Vec<Primitive>,
    profile: WorkerProfile,
    origin: [usize; 3],
}

impl Worker {
    /// Block `rank` with masses produced by `init(global cell, out)`.
    pub fn new(
        rank: usize,
        shared: Arc<Shared>,
        endpoint: Box<dyn Endpoint>,
        init: &(dyn Fn([usize; 3], &mut [f64]) + Sync + '_),
    ) -> Result<Self> {
        let d = &shared.decomposition;
        let n = d.block_extents();
        let n_v = shared.vgrid.len();
        let origin = d.origin(rank);
        let mut field = BlockField::zeros(n, n_v);
        let mut conserved = Vec::with_capacity(field.interior_len());
        for j in 0..field.interior_len() {
            let local = [j % n[0], (j / n[0]) % n[1], j / (n[0] * n[1])];
            let global = [0, 1, 2].map(|a| origin[a] + local[a]);
            let p = field.interior(j);
            init(global, field.cell_mut(p));
            conserved.push(cell_moments(field.cell(p), &shared.vgrid));
        }
        let peers = d
            .neighbors(rank)
            .iter()
            .map(|nb| (d.shifted(rank, nb.direction.map(|c| -c)), nb.rank))
            .collect();
        let spectral = match &shared.collision {
            Collision::Boltzmann { config, .. } => Some(SpectralWorkspace::new(config, &shared.vgrid)?),
            _ => None,
        };
        let cells = field.interior_len();
        Ok(Self {
            rank,
            endpoint,
            field,
            conserved,
            cell: GenericCell::new(&shared.vgrid),
            ghosts: GhostStatus::new(n_v),
            escapes: Vec::new(),
            step: 0,
            peers,
            spectral,
            scratch: Vec::new(),
            prims: Vec::new(),
            profile: WorkerProfile {
                cells,
                ..Default::default()
            },
            origin,
            shared,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn profile(&self) -> &WorkerProfile {
        &self.profile
    }

    pub fn conserved(&self) -> &[Conserved] {
        &self.conserved
    }

    pub fn field(&self) -> &BlockField {
        &self.field
    }

    pub fn origin(&self) -> [usize; 3] {
        self.origin
    }

    fn global_cell(&self, j: usize) -> usize {
        let n = self.field.extents();
        let g = self.shared.decomposition.grid_n();
        let p = [
            self.origin[0] + j % n[0],
            self.origin[1] + (j / n[0]) % n[1],
            self.origin[2] + j / (n[0] * n[1]),
        ];
        p[0] + g * (p[1] + g * p[2])
    }

    fn at_step(&self, e: FksError) -> FksError {
        FksError::AtStep {
            step: self.step as usize,
            worker: self.rank,
            source: Box::new(e),
        }
    }

    /// Collision, generic-cell advance, local ghost copies and sends.
    pub fn begin_step(&mut self, dt: f64) -> Result<()> {
        let start = Instant::now();
        let r = self.begin_inner(dt).map_err(|e| self.at_step(e));
        self.profile.total += start.elapsed().as_secs_f64();
        r
    }

    /// Receives, ghost fill, conservative update and mass shift.
    pub fn finish_step(&mut self) -> Result<()> {
        let start = Instant::now();
        let r = self.finish_inner().map_err(|e| self.at_step(e));
        self.profile.total += start.elapsed().as_secs_f64();
        if r.is_ok() {
            self.step += 1;
            self.profile.steps += 1;
        }
        r
    }

    fn begin_inner(&mut self, dt: f64) -> Result<()> {
        let shared = Arc::clone(&self.shared);
        let vg = &shared.vgrid;
        let cells = self.field.interior_len();
        let mut t = Instant::now();
        match &shared.collision {
            Collision::None => {}
            Collision::Bgk(params) => {
                self.prims.clear();
                for j in 0..cells {
                    let p = primitive_from_conserved(&self.conserved[j], self.global_cell(j))?;
                    self.prims.push(p);
                }
                t = self.profile.add(Routine::ToPrimitive, t);
                let mut overshoot = false;
                for j in 0..cells {
                    let p = self.field.interior(j);
                    let status = bgk_step(
                        self.field.cell_mut(p),
                        &self.prims[j],
                        params,
                        dt,
                        vg,
                        &mut self.scratch,
                    );
                    overshoot |= status.overshoot;
                }
                if overshoot {
                    if self.profile.bgk_overshoot_steps == 0 && self.rank == 0 {
                        log::warn!(
                            "dt * nu = {} > 1: explicit BGK step overshoots equilibrium",
                            dt * params.nu()
                        );
                    }
                    self.profile.bgk_overshoot_steps += 1;
                }
                t = self.profile.add(Routine::Collision, t);
            }
            Collision::Boltzmann { kernel, .. } => {
                let ws = self.spectral.as_mut().expect("workspace for spectral collisions");
                for j in 0..cells {
                    let p = self.field.interior(j);
                    self.scratch.resize(vg.len(), 0.0);
                    let diag = ws.q_fast(self.field.cell(p), kernel, &mut self.scratch)?;
                    let masses = self.field.cell_mut(p);
                    for (m, q) in masses.iter_mut().zip(&self.scratch) {
                        *m += dt * q;
                    }
                    if masses.iter().any(|m| !m.is_finite()) {
                        let cell = self.global_cell(j);
                        return Err(FksError::InvalidState {
                            cell,
                            reason: "non-finite mass after collision".into(),
                        });
                    }
                    let rel = diag.max_imag_residue / diag.max_abs.max(f64::MIN_POSITIVE);
                    self.profile.max_imag_residue = self.profile.max_imag_residue.max(rel);
                }
                self.profile.transforms = ws.transforms();
                t = self.profile.add(Routine::Collision, t);
            }
        }

        self.escapes = advance_generic_cell(&mut self.cell, dt, shared.dx)?;
        t = self.profile.add(Routine::Transport, t);

        self.ghosts.clear();
        shared.plan.fill_local(&mut self.field, &self.escapes);
        for (dir, &(to, _)) in self.peers.iter().enumerate() {
            let msg = shared.plan.outgoing(&self.field, &self.escapes, dir, self.step);
            self.profile.values_sent += msg.value_count();
            self.profile.messages_sent += 1;
            self.endpoint.send(to, msg.encode())?;
        }
        self.profile.add(Routine::Communication, t);
        Ok(())
    }

    fn finish_inner(&mut self) -> Result<()> {
        let shared = Arc::clone(&self.shared);
        let mut t = Instant::now();
        let mut received = 0;
        for dir in 0..self.peers.len() {
            let from = self.peers[dir].1;
            let bytes = self.endpoint.recv(from)?;
            let msg = ExchangeMessage::decode(&bytes)?;
            received += msg.value_count();
            shared
                .plan
                .apply(&mut self.field, &self.escapes, dir, self.step, &msg)?;
        }
        let expected = shared.plan.expected_values(&self.escapes);
        if received != expected {
            return Err(FksError::protocol(format!(
                "received {received} ghost values, geometry requires {expected}"
            )));
        }
        self.profile.values_received += received;
        shared.plan.mark_ready(&self.escapes, &mut self.ghosts);
        t = self.profile.add(Routine::Communication, t);

        update_and_shift(
            &mut self.conserved,
            &mut self.field,
            &self.escapes,
            &shared.vgrid,
            &self.ghosts,
        )?;
        self.profile.add(Routine::ToConservative, t);
        Ok(())
    }
}
