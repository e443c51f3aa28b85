//! Scenarios, the closed-loop executive, metrics and log I/O.

pub mod analyze;
pub mod config;
pub mod csv;
pub mod metrics;
pub mod runner;
pub mod scenario;
pub mod sweep;
pub mod trajectory;

pub use config::ConfigError;
pub use metrics::{metrics, MetricSample, MetricsError, MetricsReport};
pub use runner::{initial_state, run_scenario, RunError, RunLog, TickRecord};
pub use scenario::Scenario;
pub use trajectory::{roulette, RouletteParams, Trajectory};
