//! Incremental attitude command and the attitude PD law.

use std::f64::consts::FRAC_PI_2;

use crate::{ControlGains, Quaternion, Vec3};

/// Threshold on `1 - w` below which the small-angle error limit is used.
pub const EPS_W: f64 = 1e-6;
const EPS_ALIGN: f64 = 1e-12;
const EPS_NORMAL: f64 = 1e-12;

/// Command relative to the current attitude, split into tilt and yaw parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeCommand {
    /// `xi_c = tilt * yaw`
    pub total: Quaternion,
    pub tilt: Quaternion,
    pub yaw: Quaternion,
    /// yaw-plane normal expressed in the tilted command frame
    pub yaw_normal: Vec3,
}

/// Keeps the branch memory used at the `n_2 = 0` singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeCommander {
    last_sign: f64,
}

impl Default for AttitudeCommander {
    fn default() -> Self {
        Self { last_sign: 1.0 }
    }
}

impl AttitudeCommander {
    pub fn command(&mut self, thrust_vector: &Vec3, attitude: &Quaternion, yaw_ref: f64) -> AttitudeCommand {
        // commanded -b_z in the body frame (tau < 0, so tau b_z points along -b_z)
        let d = attitude.rotate_inverse(&(thrust_vector / thrust_vector.norm()));
        let w = 1.0 - d.z;
        let tilt = if w <= EPS_ALIGN {
            Quaternion::new(0.0, 1.0, 0.0, 0.0)
        } else {
            Quaternion::new(w, d.y, -d.x, 0.0).normalize()
        };

        let (s, c) = yaw_ref.sin_cos();
        let frame = *attitude * tilt;
        let n = frame.rotate_inverse(&Vec3::new(s, -c, 0.0));
        let phi = if n.x.hypot(n.y) <= EPS_NORMAL {
            0.0
        } else if n.y.abs() <= EPS_NORMAL {
            self.last_sign * FRAC_PI_2
        } else {
            let phi = (-n.x / n.y).atan();
            if phi != 0.0 {
                self.last_sign = phi.signum();
            }
            phi
        };
        let yaw = Quaternion::from_yaw(phi);
        AttitudeCommand { total: tilt * yaw, tilt, yaw, yaw_normal: n }
    }
}

/// Stateless form of [`AttitudeCommander::command`].
pub fn attitude_command(thrust_vector: &Vec3, attitude: &Quaternion, yaw_ref: f64) -> AttitudeCommand {
    AttitudeCommander::default().command(thrust_vector, attitude, yaw_ref)
}

/// Three-element rotation vector of a quaternion, shortest rotation.
pub fn error_angles(q: &Quaternion) -> Vec3 {
    let q = q.canonical();
    let w = q.w.min(1.0);
    if 1.0 - w < EPS_W {
        return 2.0 * q.vector();
    }
    2.0 * w.acos() / (1.0 - w * w).sqrt() * q.vector()
}

/// `Omega_dot_c = K_xi xi_e + K_Omega (Omega_ref - Omega_f) + Omega_dot_ref`.
pub fn attitude_control(xi_e: &Vec3, rate_ref: &Vec3, rate_f: &Vec3, rate_deriv_ref: &Vec3, gains: &ControlGains) -> Vec3 {
    gains.k_xi.component_mul(xi_e) + gains.k_omega.component_mul(&(rate_ref - rate_f)) + rate_deriv_ref
}
