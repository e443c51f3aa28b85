//! Per-tick CSV log with a fixed column order.

use std::io::{self, Write};

use super::config::ConfigError;
use super::metrics::{attitude_yaw, MetricSample};
use super::runner::{RunLog, TickRecord};
use crate::{Quaternion, Vec3, Vec4};

pub const HEADER: [&str; 37] = [
    "t", "x", "y", "z", "xr", "yr", "zr", "vx", "vy", "vz", "qw", "qx", "qy", "qz", "wx", "wy", "wz", "w1", "w2", "w3", "w4",
    "z1", "z2", "z3", "z4", "acx", "acy", "acz", "mcx", "mcy", "mcz", "fex", "fey", "fez", "fhx", "fhy", "fhz",
];

/// One parsed log line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub t: f64,
    pub position: Vec3,
    pub position_ref: Vec3,
    pub velocity: Vec3,
    pub attitude: Quaternion,
    pub body_rate: Vec3,
    pub motor_speeds: Vec4,
    pub throttle: Vec4,
    pub accel_cmd: Vec3,
    pub moment_cmd: Vec3,
    pub force_applied: Vec3,
    pub force_estimate: Vec3,
}

impl LogRow {
    pub fn from_record(r: &TickRecord) -> Self {
        Self {
            t: r.t,
            position: r.state.position,
            position_ref: r.reference.position,
            velocity: r.state.velocity,
            attitude: r.state.attitude,
            body_rate: r.state.body_rate,
            motor_speeds: r.state.motor_speeds,
            throttle: r.outputs.throttle,
            accel_cmd: r.outputs.accel_cmd,
            moment_cmd: r.outputs.moment_cmd,
            force_applied: r.disturbance.force,
            force_estimate: r.force_estimate,
        }
    }

    fn values(&self) -> [f64; 37] {
        let q = self.attitude;
        let mut v = [0.0; 37];
        let parts: [&[f64]; 12] = [
            &[self.t],
            self.position.as_slice(),
            self.position_ref.as_slice(),
            self.velocity.as_slice(),
            &[q.w, q.x, q.y, q.z],
            self.body_rate.as_slice(),
            self.motor_speeds.as_slice(),
            self.throttle.as_slice(),
            self.accel_cmd.as_slice(),
            self.moment_cmd.as_slice(),
            self.force_applied.as_slice(),
            self.force_estimate.as_slice(),
        ];
        let mut i = 0;
        for p in parts {
            v[i..i + p.len()].copy_from_slice(p);
            i += p.len();
        }
        v
    }

    fn from_values(v: &[f64; 37]) -> Self {
        let v3 = |i: usize| Vec3::new(v[i], v[i + 1], v[i + 2]);
        let v4 = |i: usize| Vec4::new(v[i], v[i + 1], v[i + 2], v[i + 3]);
        Self {
            t: v[0],
            position: v3(1),
            position_ref: v3(4),
            velocity: v3(7),
            attitude: Quaternion::new(v[10], v[11], v[12], v[13]),
            body_rate: v3(14),
            motor_speeds: v4(17),
            throttle: v4(21),
            accel_cmd: v3(25),
            moment_cmd: v3(28),
            force_applied: v3(31),
            force_estimate: v3(34),
        }
    }
}

pub fn write_rows<W: Write>(out: &mut W, rows: impl IntoIterator<Item = LogRow>) -> io::Result<()> {
    writeln!(out, "{}", HEADER.join(","))?;
    let mut line = String::new();
    for row in rows {
        line.clear();
        for (i, v) in row.values().iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:.8e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_log<W: Write>(out: &mut W, log: &RunLog) -> io::Result<()> {
    write_rows(out, log.records.iter().map(LogRow::from_record))
}

/// Strict reader: exact header, 37 finite numbers per line.
pub fn read_log(text: &str) -> Result<Vec<LogRow>, ConfigError> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(ConfigError::Syntax { line: 1, msg: "empty log".into() });
    };
    if header.trim_end() != HEADER.join(",") {
        return Err(ConfigError::Syntax { line: 1, msg: "unexpected header".into() });
    }
    let mut rows = Vec::new();
    for (i, l) in lines {
        let line = i + 1;
        if l.trim().is_empty() {
            continue;
        }
        let mut v = [0.0; 37];
        let mut n = 0;
        for field in l.split(',') {
            if n == 37 {
                return Err(ConfigError::Syntax { line, msg: "too many columns".into() });
            }
            v[n] = super::config::parse_f64(field).map_err(|msg| ConfigError::Syntax { line, msg })?;
            n += 1;
        }
        if n != 37 {
            return Err(ConfigError::Syntax { line, msg: format!("expected 37 columns, found {n}") });
        }
        rows.push(LogRow::from_values(&v));
    }
    Ok(rows)
}

/// Metric inputs recovered from a log. The file carries neither the yaw
/// reference nor the acceleration, so the yaw reference is supplied and the
/// acceleration is the central difference of the logged velocity.
pub fn metric_samples(rows: &[LogRow], yaw_ref: f64) -> Vec<MetricSample> {
    let n = rows.len();
    (0..n)
        .map(|i| {
            let r = &rows[i];
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            let dt = rows[b].t - rows[a].t;
            let accel = if b > a && dt > 0.0 { (rows[b].velocity - rows[a].velocity) / dt } else { Vec3::zeros() };
            MetricSample {
                position: r.position,
                position_ref: r.position_ref,
                yaw: attitude_yaw(&r.attitude),
                yaw_ref,
                velocity: r.velocity,
                accel,
                force_estimate: r.force_estimate,
            }
        })
        .collect()
}
