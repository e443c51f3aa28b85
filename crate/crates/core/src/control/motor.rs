use crate::{ThrottleCurve, Vec4};

/// Throttle map plus the integral of motor-speed error.
#[derive(Debug, Clone, PartialEq)]
pub struct MotorMap {
    pub curves: [ThrottleCurve; 4],
    pub gains: Vec4,
    integral: Vec4,
    prev_error: Option<Vec4>,
}

impl MotorMap {
    pub fn new(curves: [ThrottleCurve; 4], gains: Vec4) -> Self {
        Self { curves, gains, integral: Vec4::zeros(), prev_error: None }
    }

    /// Accumulated speed error, rad.
    pub fn integral(&self) -> &Vec4 {
        &self.integral
    }

    pub fn feedforward(&self, omega: &Vec4) -> Vec4 {
        Vec4::from_fn(|i, _| self.curves[i].eval(omega[i]))
    }
}

/// `zeta = p(w_c) + K_I int (w_c - w_m) dt` with trapezoidal integration.
/// A channel whose output saturates keeps its previous integral.
pub fn motor_speed_control(omega_cmd: &Vec4, omega_meas: &Vec4, map: &mut MotorMap, dt: f64) -> Vec4 {
    let err = omega_cmd - omega_meas;
    let prev = map.prev_error.unwrap_or(err);
    let ff = map.feedforward(omega_cmd);
    let mut zeta = Vec4::zeros();
    for i in 0..4 {
        let candidate = map.integral[i] + 0.5 * (err[i] + prev[i]) * dt;
        let z = ff[i] + map.gains[i] * candidate;
        if (0.0..=1.0).contains(&z) {
            map.integral[i] = candidate;
            zeta[i] = z;
        } else {
            zeta[i] = (ff[i] + map.gains[i] * map.integral[i]).clamp(0.0, 1.0);
        }
    }
    map.prev_error = Some(err);
    zeta
}
