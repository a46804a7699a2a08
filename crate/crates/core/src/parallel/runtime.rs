use std::sync::Arc;
use std::time::Instant;

use super::channel::Transport;
use super::decomposition::Decomposition;
use super::halo::HaloPlan;
use super::worker::{Collision, Shared, Worker, WorkerProfile};
use crate::error::{FksError, Result};
use crate::phase_space::{Conserved, ConservedField, MassField, SpatialGrid, VelocityGrid};

/// How workers are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// One OS thread per worker.
    #[default]
    Threads,
    /// All workers on the calling thread, one phase at a time.
    RoundRobin,
}

/// Everything a run needs besides the initial state and the transport.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub sgrid: SpatialGrid,
    pub vgrid: VelocityGrid,
    pub collision: Collision,
    pub steps: Vec<f64>,
    pub decomposition: Decomposition,
    pub schedule: Schedule,
    /// Assemble the global mass field at the end (large for big grids).
    pub gather_masses: bool,
}

/// Fills the masses of one global cell.
pub type InitFn<'a> = dyn Fn([usize; 3], &mut [f64]) + Sync + 'a;

#[derive(Debug)]
pub struct RunOutput {
    pub conserved: ConservedField,
    pub masses: Option<MassField>,
    pub profiles: Vec<WorkerProfile>,
    pub steps: usize,
    pub wall_seconds: f64,
}

struct Finished {
    rank: usize,
    origin: [usize; 3],
    extents: [usize; 3],
    conserved: Vec<Conserved>,
    masses: Option<Vec<f64>>,
    profile: WorkerProfile,
}

fn finish(w: Worker, gather: bool) -> Finished {
    let field = w.field();
    let masses = gather.then(|| {
        (0..field.interior_len())
            .flat_map(|j| field.cell(field.interior(j)).iter().copied())
            .collect()
    });
    Finished {
        rank: w.rank(),
        origin: w.origin(),
        extents: field.extents(),
        conserved: w.conserved().to_vec(),
        masses,
        profile: w.profile().clone(),
    }
}

fn run_worker(mut w: Worker, steps: &[f64], gather: bool) -> Result<Finished> {
    for &dt in steps {
        w.begin_step(dt)?;
        w.finish_step()?;
    }
    Ok(finish(w, gather))
}

fn panic_reason(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panicked".into())
}

/// Picks the error that explains a failed run: a worker's own failure over
/// the disconnects it causes in its peers.
fn primary_error(errors: Vec<FksError>) -> FksError {
    let idx = errors
        .iter()
        .position(|e| !matches!(e.root(), FksError::Transport { .. }))
        .unwrap_or(0);
    errors.into_iter().nth(idx).expect("at least one error")
}

/// Runs the time loop on one worker per block and gathers the result.
pub fn run_workers(spec: &RunSpec, init: &InitFn<'_>, transport: &dyn Transport) -> Result<RunOutput> {
    let d = &spec.decomposition;
    if d.grid_n() != spec.sgrid.n_per_axis() {
        return Err(FksError::Dimension(format!(
            "decomposition of a {}^3 grid used with a {}^3 grid",
            d.grid_n(),
            spec.sgrid.n_per_axis()
        )));
    }
    let shared = Arc::new(Shared {
        decomposition: d.clone(),
        plan: HaloPlan::new(d),
        vgrid: spec.vgrid.clone(),
        dx: spec.sgrid.dx(),
        collision: spec.collision.clone(),
    });
    let start = Instant::now();
    let endpoints = transport.connect(d.workers());
    let mut workers = Vec::with_capacity(d.workers());
    for (rank, ep) in endpoints.into_iter().enumerate() {
        workers.push(Worker::new(rank, Arc::clone(&shared), ep, init)?);
    }

    let finished: Vec<Finished> = match spec.schedule {
        Schedule::RoundRobin => {
            for &dt in &spec.steps {
                for w in workers.iter_mut() {
                    w.begin_step(dt)?;
                }
                for w in workers.iter_mut() {
                    w.finish_step()?;
                }
            }
            workers.into_iter().map(|w| finish(w, spec.gather_masses)).collect()
        }
        Schedule::Threads => {
            let results: Vec<Result<Finished>> = std::thread::scope(|s| {
                let handles: Vec<_> = workers
                    .into_iter()
                    .map(|w| {
                        let rank = w.rank();
                        let steps = &spec.steps;
                        let gather = spec.gather_masses;
                        let h = std::thread::Builder::new()
                            .name(format!("fks-worker-{rank}"))
                            .spawn_scoped(s, move || run_worker(w, steps, gather));
                        (rank, h)
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|(rank, h)| match h {
                        Err(e) => Err(FksError::Worker {
                            worker: rank,
                            reason: format!("could not start thread: {e}"),
                        }),
                        Ok(h) => h.join().unwrap_or_else(|p| {
                            Err(FksError::Worker {
                                worker: rank,
                                reason: panic_reason(p),
                            })
                        }),
                    })
                    .collect()
            });
            let (ok, errs): (Vec<_>, Vec<_>) = results.into_iter().partition(|r| r.is_ok());
            if !errs.is_empty() {
                return Err(primary_error(errs.into_iter().map(|r| r.err().unwrap()).collect()));
            }
            ok.into_iter().map(|r| r.ok().unwrap()).collect()
        }
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    Ok(gather(spec, finished, wall_seconds))
}

fn gather(spec: &RunSpec, mut parts: Vec<Finished>, wall_seconds: f64) -> RunOutput {
    parts.sort_by_key(|p| p.rank);
    let g = spec.sgrid.n_per_axis();
    let n_v = spec.vgrid.len();
    let mut conserved = vec![Conserved::ZERO; spec.sgrid.len()];
    let mut masses = spec.gather_masses.then(|| MassField::zeros(spec.sgrid.len(), n_v));
    for p in &parts {
        let n = p.extents;
        for j in 0..n[0] * n[1] * n[2] {
            let c = [
                p.origin[0] + j % n[0],
                p.origin[1] + (j / n[0]) % n[1],
                p.origin[2] + j / (n[0] * n[1]),
            ];
            let gi = c[0] + g * (c[1] + g * c[2]);
            conserved[gi] = p.conserved[j];
            if let (Some(m), Some(src)) = (masses.as_mut(), p.masses.as_ref()) {
                m.cell_mut(gi).copy_from_slice(&src[j * n_v..(j + 1) * n_v]);
            }
        }
    }
    RunOutput {
        conserved: ConservedField::new(conserved),
        masses,
        steps: parts.first().map_or(0, |p| p.profile.steps),
        profiles: parts.into_iter().map(|p| p.profile).collect(),
        wall_seconds,
    }
}
