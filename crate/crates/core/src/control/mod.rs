//! The control cascade: position PD, INDI on linear acceleration, quaternion
//! attitude command, attitude PD with flatness feedforward, INDI on angular
//! acceleration, nonlinear allocation and motor-speed control.

pub mod allocation;
pub mod attitude;
pub mod controller;
pub mod indi;
pub mod motor;
pub mod position;

use thiserror::Error;

pub use allocation::{
    allocate, allocate_linearized, yaw_moment_bounds, Allocation, AllocationSettings, LinearizedAllocator, Saturation,
};
pub use attitude::{attitude_command, attitude_control, error_angles, AttitudeCommand, AttitudeCommander};
pub use controller::{Controller, ControllerConfig, FeedforwardSource, LoopOutputs, ModeFlags, Tick};
pub use indi::{indi_angular, indi_linear, nonincremental_angular, nonincremental_linear, ThrustCommand};
pub use motor::{motor_speed_control, MotorMap};
pub use position::position_control;

use crate::flatness::FlatnessError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("commanded thrust vector is degenerate (|tau b_z| = {0:.3e})")]
    DegenerateThrust(f64),
    #[error("allocation Newton iteration did not converge (residual {0:.3e})")]
    NoConvergence(f64),
    #[error("flatness feedforward failed: {0}")]
    Flatness(#[from] FlatnessError),
    #[error("non-finite value in controller output")]
    NonFinite,
}
