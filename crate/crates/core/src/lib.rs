//! Quadrotor flight-dynamics simulator with a cascaded trajectory-tracking
//! controller: differential-flatness feedforward, incremental nonlinear
//! dynamic inversion (INDI) of linear and angular acceleration, nonlinear
//! control allocation and integrating motor-speed control.
//!
//! Frames are north-east-down with `+z` pointing down. Gravity acts along
//! `+i_z` and the collective thrust `T` is non-positive along the body axis
//! `b_z`, so a hovering vehicle has specific thrust `tau = T/m = -g`.
//! Quaternions use the Hamilton convention with `R u = q * u * q^-1`.

pub mod analysis;
pub mod control;
pub mod dynamics;
pub mod filters;
pub mod flatness;
pub mod harness;
pub mod params;
pub mod quaternion;
pub mod state;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Vec4 = nalgebra::Vector4<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Mat4 = nalgebra::Matrix4<f64>;

/// Unit vector along the inertial down axis.
pub fn i_z() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

pub use params::{ControlGains, ThrottleCurve, VehicleParams};
pub use quaternion::Quaternion;
pub use state::VehicleState;
