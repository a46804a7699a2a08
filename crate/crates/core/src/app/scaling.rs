use std::fmt::Write as _;

use super::config::RunConfig;
use super::run::{run_simulation, ProfileReport};
use crate::error::{FksError, Result};

#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub workers: usize,
    pub report: ProfileReport,
    pub speedup: f64,
    pub efficiency: f64,
}

#[derive(Debug, Clone)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub hardware_threads: usize,
}

/// Speedup of `times[i]` over `times[0]` and efficiency against the
/// worker ratio.
pub fn speedup_efficiency(workers: &[usize], times: &[f64]) -> Vec<(f64, f64)> {
    workers
        .iter()
        .zip(times)
        .map(|(&w, &t)| {
            let s = times[0] / t;
            (s, s / (w as f64 / workers[0] as f64))
        })
        .collect()
}

/// Runs the same problem at each worker count, sorted ascending, with the
/// default decomposition for each count.
pub fn scaling_benchmark(config: &RunConfig, worker_counts: &[usize]) -> Result<ScalingTable> {
    if worker_counts.is_empty() {
        return Err(FksError::config("benchmark needs at least one worker count"));
    }
    let mut counts = worker_counts.to_vec();
    counts.sort_unstable();
    counts.dedup();
    let mut reports = Vec::with_capacity(counts.len());
    for &w in &counts {
        let mut c = config.clone();
        c.workers = Some(w);
        c.dims = None;
        let sim = run_simulation(&c)?;
        log::info!("{w} workers: {:.3} s", sim.report.loop_seconds);
        reports.push(sim.report);
    }
    let times: Vec<f64> = reports.iter().map(|r| r.loop_seconds).collect();
    let se = speedup_efficiency(&counts, &times);
    Ok(ScalingTable {
        rows: counts
            .into_iter()
            .zip(reports)
            .zip(se)
            .map(|((workers, report), (speedup, efficiency))| ScalingRow {
                workers,
                report,
                speedup,
                efficiency,
            })
            .collect(),
        hardware_threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
    })
}

impl ScalingTable {
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "hardware threads: {}", self.hardware_threads);
        let _ = writeln!(
            s,
            "{:>7} {:>9} {:>12} {:>12} {:>12} {:>14} {:>8} {:>10}",
            "workers", "dims", "T [s]", "T_cycle", "T_cell", "T_cell*workers", "speedup", "efficiency"
        );
        for r in &self.rows {
            let d = r.report.dims;
            let _ = writeln!(
                s,
                "{:>7} {:>9} {:>12.5} {:>12.5e} {:>12.5e} {:>14.5e} {:>8.3} {:>10.3}",
                r.workers,
                format!("{}x{}x{}", d[0], d[1], d[2]),
                r.report.loop_seconds,
                r.report.t_cycle(),
                r.report.t_cell(),
                r.report.t_cell_worker(),
                r.speedup,
                r.efficiency
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry_is_ideal() {
        assert_eq!(speedup_efficiency(&[4], &[2.5]), vec![(1.0, 1.0)]);
        let se = speedup_efficiency(&[1, 2, 4], &[8.0, 4.0, 4.0]);
        assert_eq!(se[1], (2.0, 1.0));
        assert_eq!(se[2], (2.0, 0.5));
    }
}
