use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use super::config::{CollisionKind, RunConfig};
use super::init::initializer;
use crate::bgk::BgkParams;
use crate::error::Result;
use crate::parallel::{
    build_decomposition, default_dims, run_workers, ChannelTransport, Collision, Routine, RunSpec, Transport,
    WorkerProfile,
};
use crate::phase_space::{ConservedField, MassField, SpatialGrid, VelocityGrid};
use crate::spectral::{precompute_kernel, SpectralConfig, SpectralWorkspace};
use crate::transport::{select_dt, time_steps};

/// Routine timings of a run, averaged over workers.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileReport {
    pub routine_seconds: [f64; 5],
    /// Mean time inside the step functions.
    pub total_seconds: f64,
    /// Slowest worker's time inside the step functions.
    pub loop_seconds: f64,
    pub cycles: usize,
    pub cells: usize,
    pub workers: usize,
    pub dims: [usize; 3],
    pub precompute_seconds: f64,
    pub transforms_per_cell: Option<usize>,
    pub messages_sent: usize,
    pub values_sent: usize,
    pub bgk_overshoot_steps: usize,
    pub max_imag_residue: f64,
}

impl ProfileReport {
    pub fn from_profiles(profiles: &[WorkerProfile], cells: usize, dims: [usize; 3]) -> Self {
        let w = profiles.len().max(1) as f64;
        let mut routine_seconds = [0.0; 5];
        for p in profiles {
            for (acc, s) in routine_seconds.iter_mut().zip(p.seconds) {
                *acc += s / w;
            }
        }
        Self {
            routine_seconds,
            total_seconds: profiles.iter().map(|p| p.total).sum::<f64>() / w,
            loop_seconds: profiles.iter().map(|p| p.total).fold(0.0, f64::max),
            cycles: profiles.first().map_or(0, |p| p.steps),
            cells,
            workers: profiles.len(),
            dims,
            precompute_seconds: 0.0,
            transforms_per_cell: None,
            messages_sent: profiles.iter().map(|p| p.messages_sent).sum(),
            values_sent: profiles.iter().map(|p| p.values_sent).sum(),
            bgk_overshoot_steps: profiles.iter().map(|p| p.bgk_overshoot_steps).max().unwrap_or(0),
            max_imag_residue: profiles.iter().map(|p| p.max_imag_residue).fold(0.0, f64::max),
        }
    }

    pub fn seconds(&self, r: Routine) -> f64 {
        self.routine_seconds[r as usize]
    }

    pub fn percent(&self, r: Routine) -> f64 {
        if self.total_seconds > 0.0 {
            100.0 * self.seconds(r) / self.total_seconds
        } else {
            0.0
        }
    }

    pub fn unattributed_seconds(&self) -> f64 {
        self.total_seconds - self.routine_seconds.iter().sum::<f64>()
    }

    /// Routine with the largest share.
    pub fn dominant(&self) -> Routine {
        Routine::ALL
            .into_iter()
            .max_by(|a, b| self.seconds(*a).total_cmp(&self.seconds(*b)))
            .expect("five routines")
    }

    pub fn t_cycle(&self) -> f64 {
        self.loop_seconds / self.cycles.max(1) as f64
    }

    /// Wall time per cycle per spatial cell.
    pub fn t_cell(&self) -> f64 {
        self.t_cycle() / self.cells.max(1) as f64
    }

    /// `t_cell` times the worker count: per-cell cost of one worker.
    pub fn t_cell_worker(&self) -> f64 {
        self.t_cell() * self.workers as f64
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let d = self.dims;
        let _ = writeln!(
            s,
            "{} workers ({}x{}x{}), {} cycles, {} cells",
            self.workers, d[0], d[1], d[2], self.cycles, self.cells
        );
        let _ = writeln!(s, "{:<16}{:>14}{:>9}", "routine", "seconds", "%");
        for r in Routine::ALL {
            let _ = writeln!(s, "{:<16}{:>14.6}{:>8.2}%", r.label(), self.seconds(r), self.percent(r));
        }
        let un = self.unattributed_seconds();
        let pct = if self.total_seconds > 0.0 {
            100.0 * un / self.total_seconds
        } else {
            0.0
        };
        let _ = writeln!(s, "{:<16}{:>14.6}{:>8.2}%", "(unattributed)", un, pct);
        let _ = writeln!(s, "{:<16}{:>14.6}", "total", self.total_seconds);
        let _ = writeln!(
            s,
            "T_cycle {:.6e} s  T_cell {:.6e} s  T_cell*workers {:.6e} s",
            self.t_cycle(),
            self.t_cell(),
            self.t_cell_worker()
        );
        if self.precompute_seconds > 0.0 {
            let _ = writeln!(s, "kernel precompute {:.6} s", self.precompute_seconds);
        }
        if let Some(t) = self.transforms_per_cell {
            let _ = writeln!(s, "FFTs per cell per collision {t}");
        }
        s
    }

    pub fn key_values(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("workers", self.workers.to_string());
        kv("dims", format!("{}x{}x{}", self.dims[0], self.dims[1], self.dims[2]));
        kv("cycles", self.cycles.to_string());
        kv("cells", self.cells.to_string());
        for r in Routine::ALL {
            kv(&format!("seconds.{}", r.label()), self.seconds(r).to_string());
            kv(&format!("percent.{}", r.label()), self.percent(r).to_string());
        }
        kv("seconds.unattributed", self.unattributed_seconds().to_string());
        kv("seconds.total", self.total_seconds.to_string());
        kv("seconds.loop", self.loop_seconds.to_string());
        kv("t_cycle", self.t_cycle().to_string());
        kv("t_cell", self.t_cell().to_string());
        kv("t_cell_worker", self.t_cell_worker().to_string());
        kv("precompute_seconds", self.precompute_seconds.to_string());
        if let Some(t) = self.transforms_per_cell {
            kv("transforms_per_cell", t.to_string());
        }
        kv("messages_sent", self.messages_sent.to_string());
        kv("values_sent", self.values_sent.to_string());
        kv("bgk_overshoot_steps", self.bgk_overshoot_steps.to_string());
        kv("max_imag_residue", self.max_imag_residue.to_string());
        s
    }
}

#[derive(Debug)]
pub struct Simulation {
    pub sgrid: SpatialGrid,
    pub vgrid: VelocityGrid,
    pub dt: f64,
    pub final_time: f64,
    pub conserved: ConservedField,
    pub masses: Option<MassField>,
    pub report: ProfileReport,
}

pub fn grids(config: &RunConfig) -> Result<(SpatialGrid, VelocityGrid)> {
    Ok((
        SpatialGrid::new(config.spatial_n, config.x_min, config.x_max)?,
        VelocityGrid::new(config.velocity_n, config.v_min, config.v_max)?,
    ))
}

/// Time step and the per-step sizes the run will take.
pub fn time_plan(config: &RunConfig) -> Result<(f64, Vec<f64>)> {
    config.validate()?;
    let (sgrid, vgrid) = grids(config)?;
    let dt = select_dt(&vgrid, &sgrid, config.cfl)?;
    Ok((dt, time_steps(dt, config.stop.into())?))
}

pub fn run_simulation(config: &RunConfig) -> Result<Simulation> {
    run_simulation_with(config, &ChannelTransport::default(), false)
}

/// Full run on an explicit transport, optionally gathering the masses.
pub fn run_simulation_with(config: &RunConfig, transport: &dyn Transport, gather_masses: bool) -> Result<Simulation> {
    config.validate()?;
    let (sgrid, vgrid) = grids(config)?;
    let dims = match config.dims {
        Some(d) => d,
        None => default_dims(config.worker_count(), config.spatial_n)?,
    };
    let decomposition = build_decomposition(&sgrid, dims)?;
    let (dt, steps) = time_plan(config)?;

    let mut precompute_seconds = 0.0;
    let mut transforms_per_cell = None;
    let collision = match config.collision {
        CollisionKind::None => Collision::None,
        CollisionKind::Bgk => Collision::Bgk(BgkParams::new(config.tau)?),
        CollisionKind::Boltzmann => {
            let sc = SpectralConfig::new(config.velocity_n, config.a1, config.a2)?;
            sc.check_grid(&vgrid)?;
            let start = Instant::now();
            let kernel = precompute_kernel(&sc);
            precompute_seconds = start.elapsed().as_secs_f64();
            transforms_per_cell = Some(SpectralWorkspace::transforms_per_cell(&kernel));
            Collision::Boltzmann {
                config: sc,
                kernel: Arc::new(kernel),
            }
        }
    };
    log::info!(
        "{} on {}^3 x {}^3, {} steps of dt {:.4e}, dims {}x{}x{}",
        collision.name(),
        sgrid.n_per_axis(),
        vgrid.n_per_axis(),
        steps.len(),
        dt,
        dims[0],
        dims[1],
        dims[2]
    );

    let spec = RunSpec {
        sgrid: sgrid.clone(),
        vgrid: vgrid.clone(),
        collision,
        steps: steps.clone(),
        decomposition,
        schedule: config.schedule,
        gather_masses,
    };
    let out = {
        let init = initializer(config.init, &sgrid, &vgrid, config.seed);
        run_workers(&spec, &init, transport)?
    };

    let mut report = ProfileReport::from_profiles(&out.profiles, sgrid.len(), dims);
    report.precompute_seconds = precompute_seconds;
    report.transforms_per_cell = transforms_per_cell;
    if report.bgk_overshoot_steps > 0 {
        log::warn!("{} steps with dt*nu > 1", report.bgk_overshoot_steps);
    }
    Ok(Simulation {
        sgrid,
        vgrid,
        dt,
        final_time: steps.iter().sum(),
        conserved: out.conserved,
        masses: out.masses,
        report,
    })
}
