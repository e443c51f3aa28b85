//! Batch execution of independent scenarios on a worker pool.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::csv::write_log;
use super::metrics::MetricsReport;
use super::runner::{run_scenario, RunError};
use super::scenario::Scenario;

#[derive(Debug)]
pub struct SweepResult {
    pub scenario: PathBuf,
    pub log: PathBuf,
    pub outcome: Result<MetricsReport, String>,
    pub diverged: bool,
}

/// Worker count from an explicit value, else the `THREADS` variable, else rayon's default.
pub fn thread_count(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| std::env::var("THREADS").ok()?.trim().parse().ok()).filter(|n| *n > 0)
}

fn run_one(path: &Path, out_dir: &Path, seed: Option<u64>) -> SweepResult {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    let log_path = out_dir.join(format!("{stem}.csv"));
    let fail = |msg: String, diverged: bool| SweepResult {
        scenario: path.to_path_buf(),
        log: log_path.clone(),
        outcome: Err(msg),
        diverged,
    };
    let mut s = match Scenario::load(path) {
        Ok(s) => s,
        Err(e) => return fail(e.to_string(), false),
    };
    if let Some(seed) = seed {
        s.seed = seed;
    }
    let (log, diverged) = match run_scenario(&s) {
        Ok(log) => (log, None),
        Err(RunError::Diverged { time, reason, log }) => (*log, Some(format!("diverged at t = {time:.4} s: {reason}"))),
        Err(e) => return fail(e.to_string(), false),
    };
    let written = File::create(&log_path).map(BufWriter::new).and_then(|mut f| write_log(&mut f, &log));
    if let Err(e) = written {
        return fail(format!("{}: {e}", log_path.display()), false);
    }
    if let Some(msg) = diverged {
        return fail(msg, true);
    }
    let outcome = log.metrics(s.vehicle.gravity).map_err(|e| e.to_string());
    SweepResult { scenario: path.to_path_buf(), log: log_path, outcome, diverged: false }
}

/// Runs every scenario in isolation, writing one log per scenario into `out_dir`.
/// Results keep the input order.
pub fn sweep(paths: &[PathBuf], out_dir: &Path, seed: Option<u64>, threads: Option<usize>) -> Result<Vec<SweepResult>, String> {
    std::fs::create_dir_all(out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(threads) {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| e.to_string())?;
    Ok(pool.install(|| paths.par_iter().map(|p| run_one(p, out_dir, seed)).collect()))
}
