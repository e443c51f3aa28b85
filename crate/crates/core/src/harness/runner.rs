//! The closed-loop executive: plant at the physics rate, controller at the
//! control rate on the sensor sample of the same tick.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::scenario::Scenario;
use crate::control::{allocate, Controller, ControllerConfig, LoopOutputs};
use crate::dynamics::{disturbance_eval, inertial_acceleration, sense, step, DisturbanceState, DynamicsError, Esc};
use crate::flatness::{feedforward, reference_attitude, ReferenceSample};
use crate::{Quaternion, Vec3, VehicleParams, VehicleState};

/// Position error beyond which a run is declared diverged, m.
pub const DIVERGENCE_LIMIT: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub t: f64,
    pub state: VehicleState,
    pub reference: ReferenceSample,
    pub outputs: LoopOutputs,
    pub disturbance: DisturbanceState,
    /// external force implied by the filtered INDI signals, N
    pub force_estimate: Vec3,
    /// true inertial acceleration, m/s^2
    pub accel: Vec3,
    pub fault: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub name: String,
    pub records: Vec<TickRecord>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("invalid scenario: {0}")]
    Setup(String),
    #[error("diverged at t = {time:.4} s: {reason}")]
    Diverged { time: f64, reason: String, log: Box<RunLog> },
}

/// Plant state matching the reference at `t`: pose, velocity and rates from
/// the flatness maps, rotor speeds from the allocation of the required
/// thrust and moment. Falls back to level hover at the reference position.
pub fn initial_state(reference: &ReferenceSample, params: &VehicleParams) -> VehicleState {
    let hover = VehicleState {
        position: reference.position,
        velocity: reference.velocity,
        attitude: Quaternion::from_yaw(reference.yaw),
        ..VehicleState::hover(params, reference.position)
    };
    let Ok((r, tau)) = reference_attitude(&reference.acceleration, reference.yaw, params.gravity) else {
        return hover;
    };
    let Ok(ff) = feedforward(reference, params.gravity) else {
        return hover;
    };
    let (rate, rate_dot) = (ff.rate, ff.rate_deriv);
    let j = params.inertia;
    let moment = j * rate_dot + rate.cross(&(j * rate));
    let alloc = allocate(&moment, params.mass * tau, &hover.motor_speeds, params, &Default::default());
    VehicleState {
        position: reference.position,
        velocity: reference.velocity,
        attitude: Quaternion::from_rotation_matrix(&r),
        body_rate: rate,
        motor_speeds: alloc.speeds,
    }
}

pub fn run_scenario(s: &Scenario) -> Result<RunLog, RunError> {
    s.validate().map_err(|e| RunError::Setup(e.to_string()))?;
    let plant = &s.vehicle;
    let curve = s.throttle_curve();
    let mut cfg = ControllerConfig::new(s.controller_params(), s.gains.clone());
    cfg.flags = s.flags;
    cfg.rate_hz = s.control_rate;
    cfg.filter_cutoff = s.filter_cutoff;
    cfg.throttle = [curve; 4];
    cfg.allocation = s.allocation;
    let mut ctrl = Controller::new(cfg).map_err(|e| RunError::Setup(e.to_string()))?;
    let esc = Esc { curves: [curve; 4], battery: s.battery };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);

    let dt = 1.0 / s.control_rate;
    let substeps = s.substeps();
    let h = dt / substeps as f64;
    let ticks = s.tick_count();
    let est_params = ctrl.config().params.clone();

    let mut state = initial_state(&s.trajectory.sample(0.0), plant);
    let mut log = RunLog { name: s.name.clone(), records: Vec::with_capacity(ticks + 1) };
    for k in 0..=ticks {
        let t = k as f64 * dt;
        let reference = s.trajectory.sample(t);
        let dist = disturbance_eval(&s.disturbance, &state, t);
        let sample = sense(&state, &dist, plant, &s.noise, &mut rng);
        let tick = ctrl.tick(&sample, &reference);
        log.records.push(TickRecord {
            t,
            state,
            reference,
            outputs: tick.outputs,
            disturbance: dist,
            force_estimate: tick.outputs.filtered.external_force(&est_params),
            accel: inertial_acceleration(&state, &dist, plant),
            fault: tick.fault.is_some(),
        });
        let err = (state.position - reference.position).norm();
        if !(err <= DIVERGENCE_LIMIT) {
            return Err(RunError::Diverged { time: t, reason: format!("position error {err:.3e} m"), log: Box::new(log) });
        }
        if k == ticks {
            break;
        }
        for j in 0..substeps {
            state = match step(&state, &tick.throttle, &s.disturbance, plant, &esc, t + j as f64 * h, h) {
                Ok(next) => next,
                Err(e @ (DynamicsError::NonFinite | DynamicsError::BadStep)) => {
                    return Err(RunError::Diverged { time: t, reason: e.to_string(), log: Box::new(log) });
                }
            };
        }
    }
    Ok(log)
}
