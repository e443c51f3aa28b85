//! Tracking metrics over a run.

use thiserror::Error;

use super::runner::RunLog;
use crate::quaternion::{wrap_angle, yaw_of};
use crate::{i_z, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("log has no samples")]
    EmptyLog,
}

/// Per-tick quantities the metrics are computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub position: Vec3,
    pub position_ref: Vec3,
    pub yaw: f64,
    pub yaw_ref: f64,
    pub velocity: Vec3,
    /// inertial acceleration
    pub accel: Vec3,
    pub force_estimate: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RmsMax {
    pub rms: f64,
    pub max: f64,
}

impl RmsMax {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let (mut sum, mut max, mut n) = (0.0, 0.0f64, 0usize);
        for v in values {
            sum += v * v;
            max = max.max(v.abs());
            n += 1;
        }
        (n > 0).then(|| Self { rms: (sum / n as f64).sqrt().min(max), max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ForceSummary {
    pub mean: Vec3,
    pub mean_norm: f64,
    pub max_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsReport {
    pub samples: usize,
    /// `|x - x_ref|`, m
    pub position_error: RmsMax,
    /// wrapped `psi - psi_ref`, rad
    pub yaw_error: RmsMax,
    /// `|v|`, m/s
    pub speed: RmsMax,
    /// `|a - g i_z|`, m/s^2
    pub specific_force: RmsMax,
    pub force_estimate: ForceSummary,
}

pub fn metrics(samples: &[MetricSample], gravity: f64) -> Result<MetricsReport, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let n = samples.len();
    let pick = |f: &dyn Fn(&MetricSample) -> f64| RmsMax::of(samples.iter().map(f)).unwrap_or_default();
    let mean = samples.iter().map(|s| s.force_estimate).sum::<Vec3>() / n as f64;
    let norms = samples.iter().map(|s| s.force_estimate.norm());
    Ok(MetricsReport {
        samples: n,
        position_error: pick(&|s| (s.position - s.position_ref).norm()),
        yaw_error: pick(&|s| wrap_angle(s.yaw - s.yaw_ref)),
        speed: pick(&|s| s.velocity.norm()),
        specific_force: pick(&|s| (s.accel - gravity * i_z()).norm()),
        force_estimate: ForceSummary {
            mean,
            mean_norm: norms.clone().sum::<f64>() / n as f64,
            max_norm: norms.fold(0.0, f64::max),
        },
    })
}

/// Yaw of an attitude; 0 when the body x axis is vertical.
pub fn attitude_yaw(q: &crate::Quaternion) -> f64 {
    yaw_of(q).unwrap_or(0.0)
}

impl RunLog {
    pub fn metric_samples(&self) -> Vec<MetricSample> {
        self.records
            .iter()
            .map(|r| MetricSample {
                position: r.state.position,
                position_ref: r.reference.position,
                yaw: attitude_yaw(&r.state.attitude),
                yaw_ref: r.reference.yaw,
                velocity: r.state.velocity,
                accel: r.accel,
                force_estimate: r.force_estimate,
            })
            .collect()
    }

    /// Metrics restricted to ticks with `t` in `[from, to]`.
    pub fn metrics_between(&self, from: f64, to: f64, gravity: f64) -> Result<MetricsReport, MetricsError> {
        let s: Vec<_> = self
            .records
            .iter()
            .zip(self.metric_samples())
            .filter(|(r, _)| r.t >= from && r.t <= to)
            .map(|(_, m)| m)
            .collect();
        metrics(&s, gravity)
    }

    pub fn metrics(&self, gravity: f64) -> Result<MetricsReport, MetricsError> {
        metrics(&self.metric_samples(), gravity)
    }
}

impl std::fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "samples                 {}", self.samples)?;
        writeln!(f, "position error [m]      rms {:.6e}  max {:.6e}", self.position_error.rms, self.position_error.max)?;
        writeln!(f, "yaw error [rad]         rms {:.6e}  max {:.6e}", self.yaw_error.rms, self.yaw_error.max)?;
        writeln!(f, "speed [m/s]             rms {:.6e}  max {:.6e}", self.speed.rms, self.speed.max)?;
        writeln!(f, "|a - g i_z| [m/s^2]     rms {:.6e}  max {:.6e}", self.specific_force.rms, self.specific_force.max)?;
        let m = self.force_estimate.mean;
        write!(
            f,
            "f_ext estimate [N]      mean ({:.4e}, {:.4e}, {:.4e})  mean |f| {:.6e}  max |f| {:.6e}",
            m.x, m.y, m.z, self.force_estimate.mean_norm, self.force_estimate.max_norm
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(err: f64) -> MetricSample {
        MetricSample {
            position: Vec3::new(err, 0.0, 0.0),
            position_ref: Vec3::zeros(),
            yaw: 0.0,
            yaw_ref: 0.0,
            velocity: Vec3::zeros(),
            accel: Vec3::zeros(),
            force_estimate: Vec3::zeros(),
        }
    }

    #[test]
    fn constant_error() {
        let r = metrics(&vec![sample(0.05); 10], 9.81).unwrap();
        assert_eq!(r.position_error.rms, 0.05);
        assert_eq!(r.position_error.max, 0.05);
    }

    #[test]
    fn alternating_error() {
        let s: Vec<_> = (0..100).map(|i| sample(if i % 2 == 0 { 0.2 } else { -0.2 })).collect();
        let r = metrics(&s, 9.81).unwrap();
        assert_relative_eq!(r.position_error.rms, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn yaw_error_wraps() {
        let mut s = sample(0.0);
        s.yaw = 3.1;
        s.yaw_ref = -3.1;
        let r = metrics(&[s], 9.81).unwrap();
        assert_relative_eq!(r.yaw_error.max, 2.0 * std::f64::consts::PI - 6.2, epsilon = 1e-12);
        assert_relative_eq!(r.specific_force.max, 9.81);
    }

    #[test]
    fn empty_log() {
        assert_eq!(metrics(&[], 9.81), Err(MetricsError::EmptyLog));
    }
}
