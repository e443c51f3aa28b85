use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use indiflight::analysis::LinearModel;
use indiflight::harness::analyze::{analyze, AnalysisCase};
use indiflight::harness::csv::{metric_samples, read_log, write_log};
use indiflight::harness::sweep::sweep;
use indiflight::harness::{metrics, run_scenario, RunError, Scenario};

#[derive(Parser)]
#[command(name = "indiflight", version, about = "Quadrotor INDI simulator and response analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, write its CSV log and print metrics
    Sim {
        #[arg(long)]
        scenario: PathBuf,
        /// overrides the scenario seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write linear-loop response tables
    Analyze {
        /// force-step, moment-step, delta-sweep or accref-tracking
        #[arg(long)]
        case: String,
        /// modeling errors for the delta sweep
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.5, 1.0, 2.0, 5.0])]
        values: Vec<f64>,
        /// run the delta sweep on the non-incremental loop
        #[arg(long)]
        nonincremental: bool,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute metrics from a CSV log
    Metrics {
        #[arg(long)]
        log: PathBuf,
        /// yaw reference, which the log does not carry
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        psi_ref_rad: f64,
        #[arg(long, default_value_t = 9.81)]
        gravity: f64,
    },
    /// Run several scenarios in parallel, one log each
    Sweep {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// worker count; defaults to THREADS or the core count
        #[arg(long)]
        threads: Option<usize>,
    },
}

enum Failure {
    Invalid(String),
    Diverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Diverged(_) => 2,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Invalid(format!("{}: {e}", path.display()))
}

fn sim(scenario: &Path, seed: Option<u64>, out: &Path) -> Result<(), Failure> {
    let mut s = Scenario::load(scenario).map_err(|e| Failure::Invalid(format!("{}: {e}", scenario.display())))?;
    if let Some(seed) = seed {
        s.seed = seed;
    }
    let (log, diverged) = match run_scenario(&s) {
        Ok(log) => (log, None),
        Err(RunError::Diverged { time, reason, log }) => (*log, Some(format!("diverged at t = {time:.4} s: {reason}"))),
        Err(e) => return Err(Failure::Invalid(e.to_string())),
    };
    let mut f = create(out)?;
    write_log(&mut f, &log).and_then(|_| f.flush()).map_err(io_err(out))?;
    if let Some(msg) = diverged {
        return Err(Failure::Diverged(msg));
    }
    let report = log.metrics(s.vehicle.gravity).map_err(|e| Failure::Invalid(e.to_string()))?;
    println!("scenario                {}", s.name);
    println!("{report}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sim { scenario, seed, out } => sim(&scenario, seed, &out),
        Command::Analyze { case, values, nonincremental, duration, dt, out } => {
            let case: AnalysisCase = case.parse().map_err(Failure::Invalid)?;
            let duration = duration.unwrap_or(case.default_duration());
            if !(duration > 0.0 && dt > 0.0 && dt < duration) {
                return Err(Failure::Invalid("need 0 < dt < duration".into()));
            }
            if values.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
                return Err(Failure::Invalid("modeling errors must be positive".into()));
            }
            let table = analyze(case, &LinearModel::default(), &values, !nonincremental, duration, dt)
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            let mut f = create(&out)?;
            table.write_csv(&mut f).and_then(|_| f.flush()).map_err(io_err(&out))
        }
        Command::Metrics { log, psi_ref_rad, gravity } => {
            let text = std::fs::read_to_string(&log).map_err(io_err(&log))?;
            let rows = read_log(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", log.display())))?;
            let report = metrics(&metric_samples(&rows, psi_ref_rad), gravity).map_err(|e| Failure::Invalid(e.to_string()))?;
            println!("{report}");
            Ok(())
        }
        Command::Sweep { scenarios, out_dir, seed, threads } => {
            let results = sweep(&scenarios, &out_dir, seed, threads).map_err(Failure::Invalid)?;
            let mut worst: Option<Failure> = None;
            for r in results {
                match r.outcome {
                    Ok(m) => println!(
                        "{}: rms {:.6e} m, max {:.6e} m -> {}",
                        r.scenario.display(),
                        m.position_error.rms,
                        m.position_error.max,
                        r.log.display()
                    ),
                    Err(msg) => {
                        eprintln!("{}: {msg}", r.scenario.display());
                        let f = if r.diverged { Failure::Diverged(msg) } else { Failure::Invalid(msg) };
                        if worst.as_ref().is_none_or(|w| w.code() < f.code()) {
                            worst = Some(f);
                        }
                    }
                }
            }
            worst.map_or(Ok(()), Err)
        }
    }
}

fn main() -> ExitCode {
    // argument errors share the validation exit code; 2 is reserved for divergence
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(msg) => eprintln!("error: {msg}"),
                Failure::Diverged(msg) => eprintln!("{msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
