//! Vehicle constants, controller gains and the motor throttle map.

use thiserror::Error;

use crate::{Mat3, Mat4, Vec3, Vec4};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("motor speed limits must satisfy 0 < min < max")]
    SpeedLimits,
    #[error("control effectiveness matrix G1 is singular")]
    SingularEffectiveness,
    #[error("inertia matrix must be symmetric positive definite")]
    Inertia,
    #[error("gain {0} has a negative or non-finite entry")]
    NegativeGain(&'static str),
    #[error("throttle curve is not strictly increasing on the motor speed range")]
    ThrottleNotMonotonic,
}

/// Physical constants of the quadrotor.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleParams {
    /// kg
    pub mass: f64,
    /// m/s^2, along `+i_z`
    pub gravity: f64,
    /// kg m^2
    pub inertia: Mat3,
    /// rotor plus propeller inertia, kg m^2
    pub rotor_inertia: f64,
    /// N/(rad/s)^2
    pub k_tau: f64,
    /// N m/(rad/s)^2
    pub k_mu_z: f64,
    /// m
    pub arm_x: f64,
    /// m
    pub arm_y: f64,
    /// s
    pub motor_time_constant: f64,
    /// rad/s
    pub omega_min: f64,
    /// rad/s
    pub omega_max: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 0.609,
            gravity: 9.81,
            inertia: Mat3::from_diagonal(&Vec3::new(2.0e-3, 2.0e-3, 3.5e-3)),
            rotor_inertia: 1.0e-5,
            k_tau: 2.3e-6,
            k_mu_z: 3.0e-8,
            arm_x: 0.09,
            arm_y: 0.09,
            motor_time_constant: 0.020,
            omega_min: 150.0,
            omega_max: 2500.0,
        }
    }
}

impl VehicleParams {
    /// Maps squared motor speeds to `[mu; T]`.
    pub fn g1(&self) -> Mat4 {
        let (ly, lx, kt, kz) = (self.arm_y * self.k_tau, self.arm_x * self.k_tau, self.k_tau, self.k_mu_z);
        Mat4::new(
            ly, -ly, -ly, ly, //
            lx, lx, -lx, -lx, //
            -kz, kz, -kz, kz, //
            -kt, -kt, -kt, -kt,
        )
    }

    /// Maps motor accelerations to `[mu; T]` (rotor reaction torque).
    pub fn g2(&self) -> Mat4 {
        let j = self.rotor_inertia;
        let mut g = Mat4::zeros();
        g[(2, 0)] = -j;
        g[(2, 1)] = j;
        g[(2, 2)] = -j;
        g[(2, 3)] = j;
        g
    }

    /// Speed at which four equal rotors balance gravity.
    pub fn hover_speed(&self) -> f64 {
        (self.mass * self.gravity / (4.0 * self.k_tau)).sqrt()
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let positive = [
            ("mass", self.mass),
            ("gravity", self.gravity),
            ("k_tau", self.k_tau),
            ("k_mu_z", self.k_mu_z),
            ("arm_x", self.arm_x),
            ("arm_y", self.arm_y),
            ("motor_time_constant", self.motor_time_constant),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ParamError::NotPositive(name));
            }
        }
        if !(self.rotor_inertia >= 0.0 && self.rotor_inertia.is_finite()) {
            return Err(ParamError::NotPositive("rotor_inertia"));
        }
        if !(self.omega_min > 0.0 && self.omega_min < self.omega_max && self.omega_max.is_finite()) {
            return Err(ParamError::SpeedLimits);
        }
        let j = self.inertia;
        if (j - j.transpose()).abs().max() > 1e-12 * j.abs().max() || j.cholesky().is_none() {
            return Err(ParamError::Inertia);
        }
        if self.g1().try_inverse().is_none() {
            return Err(ParamError::SingularEffectiveness);
        }
        Ok(())
    }
}

/// Diagonal gains of the control cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlGains {
    pub k_x: Vec3,
    pub k_v: Vec3,
    pub k_a: Vec3,
    pub k_xi: Vec3,
    pub k_omega: Vec3,
    /// throttle per rad of accumulated speed error
    pub k_motor_integral: Vec4,
}

impl Default for ControlGains {
    fn default() -> Self {
        Self {
            k_x: Vec3::new(18.0, 18.0, 13.5),
            k_v: Vec3::new(7.8, 7.8, 5.9),
            k_a: Vec3::new(0.5, 0.5, 0.3),
            k_xi: Vec3::new(175.0, 175.0, 82.0),
            k_omega: Vec3::new(19.5, 19.5, 19.2),
            k_motor_integral: Vec4::repeat(3.0e-3),
        }
    }
}

impl ControlGains {
    pub fn validate(&self) -> Result<(), ParamError> {
        let ok = |v: &[f64]| v.iter().all(|x| *x >= 0.0 && x.is_finite());
        for (name, v) in [
            ("k_x", self.k_x.as_slice()),
            ("k_v", self.k_v.as_slice()),
            ("k_a", self.k_a.as_slice()),
            ("k_xi", self.k_xi.as_slice()),
            ("k_omega", self.k_omega.as_slice()),
            ("k_motor_integral", self.k_motor_integral.as_slice()),
        ] {
            if !ok(v) {
                return Err(ParamError::NegativeGain(name));
            }
        }
        Ok(())
    }
}

/// Quadratic throttle map `zeta = c2 w^2 + c1 w + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrottleCurve {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ThrottleCurve {
    /// Throttle at hover used by the default fit.
    pub const HOVER_THROTTLE: f64 = 0.45;

    /// Quadratic through three `(speed, throttle)` points.
    pub fn through(points: [(f64, f64); 3]) -> Self {
        let [(x0, y0), (x1, y1), (x2, y2)] = points;
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let c2 = (d12 - d01) / (x2 - x0);
        let c1 = d01 - c2 * (x0 + x1);
        let c0 = y0 - c1 * x0 - c2 * x0 * x0;
        Self { c0, c1, c2 }
    }

    /// Default map through `(w_min, 0.05)`, `(w_hover, 0.45)` and `(w_max, 0.95)`.
    pub fn default_for(params: &VehicleParams) -> Self {
        Self::through([
            (params.omega_min, 0.05),
            (params.hover_speed(), Self::HOVER_THROTTLE),
            (params.omega_max, 0.95),
        ])
    }

    pub fn eval(&self, w: f64) -> f64 {
        (self.c2 * w + self.c1) * w + self.c0
    }

    pub fn slope(&self, w: f64) -> f64 {
        2.0 * self.c2 * w + self.c1
    }

    /// Speed on the increasing branch that maps to `zeta`; saturates at the vertex.
    pub fn inverse(&self, zeta: f64) -> f64 {
        let disc = (self.c1 * self.c1 - 4.0 * self.c2 * (self.c0 - zeta)).max(0.0);
        let den = self.c1 + disc.sqrt();
        if den.abs() < f64::MIN_POSITIVE {
            return -self.c1 / (2.0 * self.c2);
        }
        2.0 * (zeta - self.c0) / den
    }

    pub fn is_increasing_on(&self, lo: f64, hi: f64) -> bool {
        self.slope(lo) > 0.0 && self.slope(hi) > 0.0
    }
}
