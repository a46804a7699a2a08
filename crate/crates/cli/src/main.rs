use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fks_core::app::{emit_outputs, profile_text, run_simulation, scaling_benchmark};
use fks_core::{FksError, RunConfig};

/// Fast Kinetic Scheme solver for the 3D explosion benchmark.
///
/// Settings come from the defaults, then the `--config` file, then the
/// flags below. Any config key can also be set with `--set key=value`.
#[derive(Debug, Parser)]
#[command(name = "fks", version)]
struct Args {
    /// key=value configuration file (`#` starts a comment)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Worker count; without --dims the decomposition is chosen automatically
    #[arg(long)]
    workers: Option<usize>,

    /// Workers per axis, e.g. 4x2x1
    #[arg(long)]
    dims: Option<String>,

    /// none, bgk or boltzmann
    #[arg(long)]
    collision: Option<String>,

    /// Stop after this many steps
    #[arg(long, conflicts_with = "t_final")]
    cycles: Option<usize>,

    /// Stop at this time, shortening the last step
    #[arg(long)]
    t_final: Option<f64>,

    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,

    /// Strong-scaling run over a comma-separated worker list, e.g. "1,2,4"
    #[arg(long)]
    bench: Option<String>,

    /// Seed for random initial fields
    #[arg(long)]
    seed: Option<u64>,

    /// Extra config overrides
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Print the effective configuration and exit
    #[arg(long)]
    print_config: bool,
}

fn configure(args: &Args) -> Result<RunConfig, FksError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| FksError::config(format!("--set expects key=value, got {kv:?}")))?;
        cfg.set(k.trim(), v)?;
    }
    if let Some(w) = args.workers {
        cfg.set("workers", &w.to_string())?;
        if args.dims.is_none() {
            cfg.dims = None;
        }
    }
    if let Some(d) = &args.dims {
        cfg.set("dims", d)?;
        if args.workers.is_none() {
            cfg.workers = None;
        }
    }
    if let Some(c) = &args.collision {
        cfg.set("collision", c)?;
    }
    if let Some(n) = args.cycles {
        cfg.set("cycles", &n.to_string())?;
    }
    if let Some(t) = args.t_final {
        cfg.set("t_final", &t.to_string())?;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_workers(list: &str) -> Result<Vec<usize>, FksError> {
    list.split(',')
        .map(|w| {
            w.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| FksError::config(format!("--bench expects positive worker counts, got {w:?}")))
        })
        .collect()
}

fn run(args: &Args) -> Result<(), FksError> {
    let cfg = configure(args)?;
    if args.print_config {
        print!("{}", cfg.serialize());
        return Ok(());
    }
    if let Some(list) = &args.bench {
        let counts = parse_workers(list)?;
        let table = scaling_benchmark(&cfg, &counts)?;
        let text = table.text();
        print!("{text}");
        std::fs::create_dir_all(&cfg.out).map_err(|e| FksError::io(&cfg.out, e))?;
        let path = cfg.out.join("scaling.txt");
        std::fs::write(&path, &text).map_err(|e| FksError::io(&path, e))?;
        return Ok(());
    }
    let sim = run_simulation(&cfg)?;
    let paths = emit_outputs(&sim, &cfg.out)?;
    print!("{}", profile_text(&sim.report));
    println!(
        "t = {} after {} cycles; wrote {}, {}, {}",
        sim.final_time,
        sim.report.cycles,
        paths.csv.display(),
        paths.dump.display(),
        paths.profile.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fks: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
