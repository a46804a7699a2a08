//! Flat `key=value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{FksError, Result};
use crate::parallel::{parse_dims, Schedule};
use crate::transport::StopRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionKind {
    None,
    Bgk,
    Boltzmann,
}

impl CollisionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CollisionKind::None => "none",
            CollisionKind::Bgk => "bgk",
            CollisionKind::Boltzmann => "boltzmann",
        }
    }
}

impl FromStr for CollisionKind {
    type Err = FksError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(CollisionKind::None),
            "bgk" => Ok(CollisionKind::Bgk),
            "boltzmann" => Ok(CollisionKind::Boltzmann),
            _ => Err(FksError::config(format!(
                "collision must be none, bgk or boltzmann, got {s:?}"
            ))),
        }
    }
}

/// Initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    /// Hot ball in a cold gas, both at rest and in equilibrium.
    Sod,
    Uniform,
    /// Per-cell random Maxwellians drawn from `seed`.
    Random,
}

impl InitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InitKind::Sod => "sod",
            InitKind::Uniform => "uniform",
            InitKind::Random => "random",
        }
    }
}

impl FromStr for InitKind {
    type Err = FksError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sod" => Ok(InitKind::Sod),
            "uniform" => Ok(InitKind::Uniform),
            "random" => Ok(InitKind::Random),
            _ => Err(FksError::config(format!(
                "init must be sod, uniform or random, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    Cycles(usize),
    FinalTime(f64),
}

impl From<Stop> for StopRule {
    fn from(s: Stop) -> Self {
        match s {
            Stop::Cycles(n) => StopRule::Cycles(n),
            Stop::FinalTime(t) => StopRule::FinalTime(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spatial_n: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub velocity_n: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub collision: CollisionKind,
    pub tau: f64,
    pub a1: usize,
    pub a2: usize,
    pub cfl: f64,
    pub stop: Stop,
    pub dims: Option<[usize; 3]>,
    pub workers: Option<usize>,
    pub schedule: Schedule,
    pub init: InitKind,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    /// BGK explosion on 64^3 x 16^3.
    fn default() -> Self {
        Self {
            spatial_n: 64,
            x_min: 0.0,
            x_max: 2.0,
            velocity_n: 16,
            v_min: -15.0,
            v_max: 15.0,
            collision: CollisionKind::Bgk,
            tau: 0.1,
            a1: 4,
            a2: 4,
            cfl: 1.0,
            stop: Stop::FinalTime(0.07),
            dims: None,
            workers: None,
            schedule: Schedule::Threads,
            init: InitKind::Sod,
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

pub const KEYS: [&str; 19] = [
    "spatial_n",
    "x_min",
    "x_max",
    "velocity_n",
    "v_min",
    "v_max",
    "collision",
    "tau",
    "a1",
    "a2",
    "cfl",
    "cycles",
    "t_final",
    "dims",
    "workers",
    "schedule",
    "init",
    "seed",
    "out",
];

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| FksError::config(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// Sets one key. `cycles` and `t_final` replace each other.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "spatial_n" => self.spatial_n = num(key, v)?,
            "x_min" => self.x_min = num(key, v)?,
            "x_max" => self.x_max = num(key, v)?,
            "velocity_n" => self.velocity_n = num(key, v)?,
            "v_min" => self.v_min = num(key, v)?,
            "v_max" => self.v_max = num(key, v)?,
            "collision" => self.collision = v.parse()?,
            "tau" => self.tau = num(key, v)?,
            "a1" => self.a1 = num(key, v)?,
            "a2" => self.a2 = num(key, v)?,
            "cfl" => self.cfl = num(key, v)?,
            "cycles" => self.stop = Stop::Cycles(num(key, v)?),
            "t_final" => self.stop = Stop::FinalTime(num(key, v)?),
            "dims" => self.dims = Some(parse_dims(v)?),
            "workers" => self.workers = Some(num(key, v)?),
            "schedule" => {
                self.schedule = match v {
                    "threads" => Schedule::Threads,
                    "round_robin" => Schedule::RoundRobin,
                    _ => {
                        return Err(FksError::config(format!(
                            "schedule must be threads or round_robin, got {v:?}"
                        )))
                    }
                }
            }
            "init" => self.init = v.parse()?,
            "seed" => self.seed = num(key, v)?,
            "out" => self.out = PathBuf::from(v),
            _ => return Err(FksError::config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| FksError::config(format!("line {}: expected key=value, got {line:?}", i + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(FksError::config(format!("line {}: {key} given twice", i + 1)));
            }
            if (key == "cycles" && seen.contains(&"t_final")) || (key == "t_final" && seen.contains(&"cycles")) {
                return Err(FksError::config("set either cycles or t_final, not both"));
            }
            cfg.set(key, value)
                .map_err(|e| FksError::config(format!("line {}: {}", i + 1, strip(e))))?;
            seen.push(key);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FksError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("spatial_n", self.spatial_n.to_string());
        kv("x_min", self.x_min.to_string());
        kv("x_max", self.x_max.to_string());
        kv("velocity_n", self.velocity_n.to_string());
        kv("v_min", self.v_min.to_string());
        kv("v_max", self.v_max.to_string());
        kv("collision", self.collision.as_str().into());
        kv("tau", self.tau.to_string());
        kv("a1", self.a1.to_string());
        kv("a2", self.a2.to_string());
        kv("cfl", self.cfl.to_string());
        match self.stop {
            Stop::Cycles(n) => kv("cycles", n.to_string()),
            Stop::FinalTime(t) => kv("t_final", t.to_string()),
        }
        if let Some(d) = self.dims {
            kv("dims", format!("{}x{}x{}", d[0], d[1], d[2]));
        }
        if let Some(w) = self.workers {
            kv("workers", w.to_string());
        }
        kv(
            "schedule",
            match self.schedule {
                Schedule::Threads => "threads",
                Schedule::RoundRobin => "round_robin",
            }
            .into(),
        );
        kv("init", self.init.as_str().into());
        kv("seed", self.seed.to_string());
        kv("out", self.out.display().to_string());
        s
    }

    /// Worker count implied by `workers`, else `dims`, else 1.
    pub fn worker_count(&self) -> usize {
        self.workers
            .or_else(|| self.dims.map(|d| d.iter().product()))
            .unwrap_or(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(FksError::Config(m));
        if self.spatial_n == 0 {
            return bad("spatial_n must be positive".into());
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return bad(format!("need x_min < x_max, got {} and {}", self.x_min, self.x_max));
        }
        if self.velocity_n < 2 {
            return bad("velocity_n must be at least 2".into());
        }
        if !(self.v_min.is_finite() && self.v_max.is_finite() && self.v_max > self.v_min) {
            return bad(format!("need v_min < v_max, got {} and {}", self.v_min, self.v_max));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        match self.stop {
            Stop::Cycles(_) => {}
            Stop::FinalTime(t) if t.is_finite() && t >= 0.0 => {}
            Stop::FinalTime(t) => return bad(format!("t_final must be finite and non-negative, got {t}")),
        }
        match self.collision {
            CollisionKind::None => {}
            CollisionKind::Bgk => {
                if !(self.tau.is_finite() && self.tau > 0.0) {
                    return bad(format!("bgk needs tau > 0, got {}", self.tau));
                }
            }
            CollisionKind::Boltzmann => {
                if self.a1 == 0 || self.a2 == 0 {
                    return bad("boltzmann needs a1, a2 >= 1".into());
                }
            }
        }
        if let (Some(d), Some(w)) = (self.dims, self.workers) {
            if d.iter().product::<usize>() != w {
                return bad(format!(
                    "dims {}x{}x{} hold {} workers but workers = {w}",
                    d[0],
                    d[1],
                    d[2],
                    d.iter().product::<usize>()
                ));
            }
        }
        if self.worker_count() == 0 {
            return bad("workers must be positive".into());
        }
        Ok(())
    }
}

fn strip(e: FksError) -> String {
    match e {
        FksError::Config(m) => m,
        other => other.to_string(),
    }
}
