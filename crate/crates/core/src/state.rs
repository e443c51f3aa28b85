use crate::{Quaternion, Vec3, Vec4, VehicleParams};

/// Simulation truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    /// inertial position, m
    pub position: Vec3,
    /// inertial velocity, m/s
    pub velocity: Vec3,
    pub attitude: Quaternion,
    /// body rates, rad/s
    pub body_rate: Vec3,
    /// rad/s
    pub motor_speeds: Vec4,
}

impl VehicleState {
    /// At rest at `position` with level attitude and hover motor speeds.
    pub fn hover(params: &VehicleParams, position: Vec3) -> Self {
        Self {
            position,
            velocity: Vec3::zeros(),
            attitude: Quaternion::IDENTITY,
            body_rate: Vec3::zeros(),
            motor_speeds: Vec4::repeat(params.hover_speed()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite())
            && self.velocity.iter().all(|v| v.is_finite())
            && [self.attitude.w, self.attitude.x, self.attitude.y, self.attitude.z].iter().all(|v| v.is_finite())
            && self.body_rate.iter().all(|v| v.is_finite())
            && self.motor_speeds.iter().all(|v| v.is_finite())
    }
}
