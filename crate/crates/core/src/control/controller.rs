//! One 2 kHz controller instance owning all loop state.

use super::allocation::{allocate, Allocation, AllocationSettings, LinearizedAllocator};
use super::attitude::{attitude_control, error_angles, AttitudeCommander};
use super::indi::{indi_angular, indi_linear, nonincremental_angular, nonincremental_linear};
use super::motor::{motor_speed_control, MotorMap};
use super::position::position_control;
use super::ControlError;
use crate::dynamics::SensorSample;
use crate::filters::{FilterBank, FilterError, FilteredSignals};
use crate::flatness::{feedforward, feedforward_at_state, FlatnessFeedforward, ReferenceSample};
use crate::{ControlGains, Mat3, ThrottleCurve, Vec3, Vec4, VehicleParams};

/// Where the flatness maps take attitude, thrust and rate from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeedforwardSource {
    #[default]
    Reference,
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeFlags {
    pub feedforward: bool,
    pub non_incremental: bool,
    pub linearized_allocation: bool,
    pub feedforward_source: FeedforwardSource,
}

impl Default for ModeFlags {
    fn default() -> Self {
        Self { feedforward: true, non_incremental: false, linearized_allocation: false, feedforward_source: FeedforwardSource::Reference }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    /// model used by the controller; may differ from the plant
    pub params: VehicleParams,
    pub gains: ControlGains,
    pub flags: ModeFlags,
    pub rate_hz: f64,
    pub filter_cutoff: f64,
    pub throttle: [ThrottleCurve; 4],
    pub allocation: AllocationSettings,
}

impl ControllerConfig {
    pub fn new(params: VehicleParams, gains: ControlGains) -> Self {
        let curve = ThrottleCurve::default_for(&params);
        Self {
            params,
            gains,
            flags: ModeFlags::default(),
            rate_hz: 2000.0,
            filter_cutoff: 188.5,
            throttle: [curve; 4],
            allocation: AllocationSettings::default(),
        }
    }
}

/// Per-tick record of the cascade's intermediate commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopOutputs {
    pub accel_cmd: Vec3,
    pub thrust_vector_cmd: Vec3,
    pub thrust_cmd: f64,
    pub error_angles: Vec3,
    pub rate_ref: Vec3,
    pub rate_deriv_ref: Vec3,
    pub rate_deriv_cmd: Vec3,
    pub moment_cmd: Vec3,
    pub motor_speed_cmd: Vec4,
    pub throttle: Vec4,
    pub filtered: FilteredSignals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tick {
    pub throttle: Vec4,
    pub outputs: LoopOutputs,
    /// set when a component failed and the previous throttle was held
    pub fault: Option<ControlError>,
}

#[derive(Debug, Clone)]
pub struct Controller {
    config: ControllerConfig,
    bank: FilterBank,
    motor: MotorMap,
    attitude: AttitudeCommander,
    linearized: LinearizedAllocator,
    last_throttle: Option<Vec4>,
    last_allocation: Option<Allocation>,
}

impl Controller {
    pub fn new(config: ControllerConfig) -> Result<Self, FilterError> {
        let bank = FilterBank::new(config.filter_cutoff, config.rate_hz)?;
        let motor = MotorMap::new(config.throttle, config.gains.k_motor_integral);
        Ok(Self {
            config,
            bank,
            motor,
            attitude: AttitudeCommander::default(),
            linearized: LinearizedAllocator::default(),
            last_throttle: None,
            last_allocation: None,
        })
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn motor_map(&self) -> &MotorMap {
        &self.motor
    }

    pub fn last_allocation(&self) -> Option<&Allocation> {
        self.last_allocation.as_ref()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.config.rate_hz
    }

    pub fn tick(&mut self, sample: &SensorSample, reference: &ReferenceSample) -> Tick {
        let filtered = self.bank.update(sample, &self.config.params);
        match self.cascade(sample, reference, &filtered) {
            Ok(outputs) => {
                self.last_throttle = Some(outputs.throttle);
                Tick { throttle: outputs.throttle, outputs, fault: None }
            }
            Err(e) => {
                let held = self.last_throttle.unwrap_or_else(|| self.motor.feedforward(&sample.motor_speeds));
                let outputs = LoopOutputs {
                    accel_cmd: Vec3::zeros(),
                    thrust_vector_cmd: Vec3::zeros(),
                    thrust_cmd: 0.0,
                    error_angles: Vec3::zeros(),
                    rate_ref: Vec3::zeros(),
                    rate_deriv_ref: Vec3::zeros(),
                    rate_deriv_cmd: Vec3::zeros(),
                    moment_cmd: Vec3::zeros(),
                    motor_speed_cmd: sample.motor_speeds,
                    throttle: held,
                    filtered,
                };
                self.last_throttle = Some(held);
                Tick { throttle: held, outputs, fault: Some(e) }
            }
        }
    }

    fn flatness(&self, sample: &SensorSample, reference: &ReferenceSample, f: &FilteredSignals) -> Result<FlatnessFeedforward, ControlError> {
        let cfg = &self.config;
        if !cfg.flags.feedforward {
            return Ok(FlatnessFeedforward::default());
        }
        let ff = match cfg.flags.feedforward_source {
            FeedforwardSource::Reference => feedforward(reference, cfg.params.gravity)?,
            FeedforwardSource::Measured => {
                let r: Mat3 = sample.attitude.rotation_matrix();
                feedforward_at_state(reference, &r, f.specific_thrust, f.specific_thrust_rate, &f.rate)?
            }
        };
        Ok(ff)
    }

    fn cascade(&mut self, sample: &SensorSample, reference: &ReferenceSample, f: &FilteredSignals) -> Result<LoopOutputs, ControlError> {
        let cfg = &self.config;
        let p = &cfg.params;
        let incremental = !cfg.flags.non_incremental;

        let accel_cmd = position_control(reference, &sample.position, &sample.velocity, &f.accel, &cfg.gains);
        let thrust = if incremental {
            indi_linear(&accel_cmd, f, p.mass)?
        } else {
            nonincremental_linear(&accel_cmd, p.gravity, p.mass)?
        };
        let att = self.attitude.command(&thrust.vector, &sample.attitude, reference.yaw);
        let xi_e = error_angles(&att.total);
        let ff = self.flatness(sample, reference, f)?;
        let rate_deriv_cmd = attitude_control(&xi_e, &ff.rate, &f.rate, &ff.rate_deriv, &cfg.gains);
        let moment_cmd = if incremental {
            indi_angular(&rate_deriv_cmd, f, &p.inertia)
        } else {
            nonincremental_angular(&rate_deriv_cmd, &p.inertia)
        };

        let (motor_speed_cmd, thrust_cmd) = if cfg.flags.linearized_allocation {
            let w = self.linearized.allocate(&moment_cmd, thrust.thrust, f, p, 1.0 / cfg.rate_hz);
            (w, thrust.thrust)
        } else {
            let a = allocate(&moment_cmd, thrust.thrust, &sample.motor_speeds, p, &cfg.allocation);
            self.last_allocation = Some(a);
            (a.speeds, a.thrust)
        };
        let dt = 1.0 / cfg.rate_hz;
        let throttle = motor_speed_control(&motor_speed_cmd, &sample.motor_speeds, &mut self.motor, dt);

        let out = LoopOutputs {
            accel_cmd,
            thrust_vector_cmd: thrust.vector,
            thrust_cmd,
            error_angles: xi_e,
            rate_ref: ff.rate,
            rate_deriv_ref: ff.rate_deriv,
            rate_deriv_cmd,
            moment_cmd,
            motor_speed_cmd,
            throttle,
            filtered: *f,
        };
        let finite = throttle.iter().chain(motor_speed_cmd.iter()).chain(moment_cmd.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(ControlError::NonFinite);
        }
        Ok(out)
    }
}
