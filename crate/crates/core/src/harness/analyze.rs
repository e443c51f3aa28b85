//! Response tables from the linearized loop.

use std::io::{self, Write};
use std::str::FromStr;

use crate::analysis::{build_linear_loop, tracking_response, LinearModel, LoopOptions, TfError, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisCase {
    /// position response to a unit external force step
    ForceStep,
    /// position response to a unit external moment step
    MomentStep,
    /// angular-acceleration step response per modeling error
    DeltaSweep,
    /// acceleration response to the smooth tanh reference
    AccelRefTracking,
}

impl FromStr for AnalysisCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "force-step" | "force" => Ok(Self::ForceStep),
            "moment-step" | "moment" => Ok(Self::MomentStep),
            "delta-sweep" | "delta" => Ok(Self::DeltaSweep),
            "accref-tracking" | "accref" => Ok(Self::AccelRefTracking),
            other => Err(format!("unknown case `{other}` (force-step, moment-step, delta-sweep, accref-tracking)")),
        }
    }
}

impl AnalysisCase {
    pub fn default_duration(self) -> f64 {
        match self {
            Self::ForceStep | Self::MomentStep => 10.0,
            Self::DeltaSweep => 0.5,
            Self::AccelRefTracking => 3.0,
        }
    }
}

/// Columns sharing one time base.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub t: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Table {
    fn push(&mut self, name: String, series: TimeSeries) {
        if self.t.is_empty() {
            self.t = series.t;
        }
        self.columns.push((name, series.y));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write!(out, "t")?;
        for (name, _) in &self.columns {
            write!(out, ",{name}")?;
        }
        writeln!(out)?;
        for (i, t) in self.t.iter().enumerate() {
            write!(out, "{t:.8e}")?;
            for (_, v) in &self.columns {
                write!(out, ",{:.8e}", v[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Builds the table for `case`. `values` are the modeling errors of the
/// delta sweep, run on the incremental or the non-incremental loop; both are
/// ignored by the other cases.
pub fn analyze(
    case: AnalysisCase,
    model: &LinearModel,
    values: &[f64],
    incremental: bool,
    duration: f64,
    dt: f64,
) -> Result<Table, TfError> {
    let mut table = Table { t: Vec::new(), columns: Vec::new() };
    let loops = |incremental: bool| LoopOptions { incremental, ..Default::default() };
    match case {
        AnalysisCase::ForceStep | AnalysisCase::MomentStep => {
            for (name, inc) in [("incremental", true), ("nonincremental", false)] {
                let l = build_linear_loop(model, &loops(inc));
                let tf = if case == AnalysisCase::ForceStep { l.position_per_force } else { l.position_per_moment };
                table.push(format!("x_{name}"), tf.step_response(duration, dt)?);
            }
        }
        AnalysisCase::DeltaSweep => {
            for &d in values {
                let tf = build_linear_loop(model, &LoopOptions { delta: d, ..loops(incremental) }).alpha_per_cmd;
                table.push(format!("alpha_d{d}"), tf.step_response(duration, dt)?);
            }
        }
        AnalysisCase::AccelRefTracking => {
            let with = tracking_response(model, &LoopOptions::default(), duration, dt)?;
            let without = tracking_response(model, &LoopOptions { feedforward: false, ..Default::default() }, duration, dt)?;
            table.push("a_ref".into(), with.reference);
            table.push("a_ff".into(), with.response);
            table.push("a_noff".into(), without.response);
        }
    }
    Ok(table)
}
