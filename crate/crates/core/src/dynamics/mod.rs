//! Rigid-body and motor dynamics integrated with classical RK4.

pub mod disturbance;
pub mod sensors;

use nalgebra::SVector;
use thiserror::Error;

pub use disturbance::{disturbance_eval, BodyAxis, DisturbanceModel, DisturbanceState, ForceKnot};
pub use sensors::{inertial_acceleration, sense, NoiseConfig, SensorSample};

use crate::{i_z, Quaternion, ThrottleCurve, Vec3, Vec4, VehicleParams, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("state left the finite range")]
    NonFinite,
    #[error("integration step must be positive")]
    BadStep,
}

/// Body moment and collective thrust, `[mu; T] = G1 w^2 + G2 w_dot`.
pub fn actuation(omega: &Vec4, omega_dot: &Vec4, params: &VehicleParams) -> (Vec3, f64) {
    let out = params.g1() * omega.component_mul(omega) + params.g2() * omega_dot;
    (Vec3::new(out[0], out[1], out[2]), out[3])
}

/// Linear drift of the battery factor from 1 to `final_factor` over `duration` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryDrift {
    pub final_factor: f64,
    pub duration: f64,
}

impl Default for BatteryDrift {
    fn default() -> Self {
        Self { final_factor: 1.0, duration: 1.0 }
    }
}

impl BatteryDrift {
    pub fn constant(factor: f64) -> Self {
        Self { final_factor: factor, duration: 0.0 }
    }

    pub fn factor(&self, t: f64) -> f64 {
        if self.duration <= 0.0 {
            return self.final_factor;
        }
        let s = (t / self.duration).clamp(0.0, 1.0);
        1.0 + (self.final_factor - 1.0) * s
    }
}

/// Electronic speed controllers: throttle to steady-state rotor speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Esc {
    pub curves: [ThrottleCurve; 4],
    pub battery: BatteryDrift,
}

impl Esc {
    pub fn new(curve: ThrottleCurve) -> Self {
        Self { curves: [curve; 4], battery: BatteryDrift::default() }
    }

    pub fn forward(&self, omega: &Vec4) -> Vec4 {
        Vec4::from_fn(|i, _| self.curves[i].eval(omega[i]))
    }

    /// Steady-state speed for throttle `zeta` at time `t`, clamped to the motor limits.
    pub fn target_speed(&self, zeta: &Vec4, t: f64, params: &VehicleParams) -> Vec4 {
        let b = self.battery.factor(t);
        Vec4::from_fn(|i, _| {
            let w = b * self.curves[i].inverse(zeta[i].clamp(0.0, 1.0));
            w.clamp(params.omega_min, params.omega_max)
        })
    }
}

type Packed = SVector<f64, 17>;

fn pack(s: &VehicleState) -> Packed {
    let q = s.attitude;
    let mut x = Packed::zeros();
    x.fixed_rows_mut::<3>(0).copy_from(&s.position);
    x.fixed_rows_mut::<3>(3).copy_from(&s.velocity);
    x[6] = q.w;
    x[7] = q.x;
    x[8] = q.y;
    x[9] = q.z;
    x.fixed_rows_mut::<3>(10).copy_from(&s.body_rate);
    x.fixed_rows_mut::<4>(13).copy_from(&s.motor_speeds);
    x
}

fn unpack(x: &Packed) -> VehicleState {
    VehicleState {
        position: x.fixed_rows::<3>(0).into(),
        velocity: x.fixed_rows::<3>(3).into(),
        attitude: Quaternion::new(x[6], x[7], x[8], x[9]),
        body_rate: x.fixed_rows::<3>(10).into(),
        motor_speeds: x.fixed_rows::<4>(13).into(),
    }
}

/// Time derivative of the full state for a fixed rotor-speed target.
pub fn state_derivative(
    state: &VehicleState,
    target: &Vec4,
    model: &DisturbanceModel,
    params: &VehicleParams,
    t: f64,
) -> (Vec3, Vec3, Quaternion, Vec3, Vec4) {
    let dist = disturbance_eval(model, state, t);
    let omega_dot = (target - state.motor_speeds) / params.motor_time_constant;
    let (mu, thrust) = actuation(&state.motor_speeds, &omega_dot, params);
    let bz = state.attitude.rotate(&Vec3::z());
    let accel = params.gravity * i_z() + (thrust / params.mass) * bz + dist.force / params.mass;
    let q_dot = state.attitude * Quaternion::pure(&state.body_rate);
    let q_dot = Quaternion::new(0.5 * q_dot.w, 0.5 * q_dot.x, 0.5 * q_dot.y, 0.5 * q_dot.z);
    let j = params.inertia;
    let w = state.body_rate;
    let rate_dot = j.lu().solve(&(mu + dist.moment - w.cross(&(j * w)))).unwrap_or_else(|| Vec3::repeat(f64::NAN));
    (state.velocity, accel, q_dot, rate_dot, omega_dot)
}

fn packed_derivative(x: &Packed, target: &Vec4, model: &DisturbanceModel, params: &VehicleParams, t: f64) -> Packed {
    let (p, v, q, w, m) = state_derivative(&unpack(x), target, model, params, t);
    pack(&VehicleState { position: p, velocity: v, attitude: q, body_rate: w, motor_speeds: m })
}

/// Advances the plant by `dt` with throttle `zeta` held constant.
pub fn step(
    state: &VehicleState,
    zeta: &Vec4,
    model: &DisturbanceModel,
    params: &VehicleParams,
    esc: &Esc,
    t: f64,
    dt: f64,
) -> Result<VehicleState, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::BadStep);
    }
    let target = esc.target_speed(zeta, t, params);
    step_to_target(state, &target, model, params, t, dt)
}

/// RK4 step toward a given rotor-speed target.
pub fn step_to_target(
    state: &VehicleState,
    target: &Vec4,
    model: &DisturbanceModel,
    params: &VehicleParams,
    t: f64,
    dt: f64,
) -> Result<VehicleState, DynamicsError> {
    let x0 = pack(state);
    let k1 = packed_derivative(&x0, target, model, params, t);
    let k2 = packed_derivative(&(x0 + k1 * (0.5 * dt)), target, model, params, t + 0.5 * dt);
    let k3 = packed_derivative(&(x0 + k2 * (0.5 * dt)), target, model, params, t + 0.5 * dt);
    let k4 = packed_derivative(&(x0 + k3 * dt), target, model, params, t + dt);
    let x1 = x0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let mut next = unpack(&x1);
    next.attitude = next.attitude.normalize();
    next.motor_speeds = next.motor_speeds.map(|w| w.clamp(params.omega_min, params.omega_max));
    if !next.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    Ok(next)
}
