use super::ControlError;
use crate::filters::FilteredSignals;
use crate::flatness::EPS_THRUST;
use crate::{i_z, Mat3, Vec3};

/// Commanded thrust vector `(tau b_z)_c` and collective thrust `T_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrustCommand {
    pub vector: Vec3,
    pub thrust: f64,
}

fn thrust_from_vector(vector: Vec3, mass: f64) -> Result<ThrustCommand, ControlError> {
    let n = vector.norm();
    if !(n > EPS_THRUST) {
        return Err(ControlError::DegenerateThrust(n));
    }
    Ok(ThrustCommand { vector, thrust: -mass * n })
}

/// `(tau b_z)_c = (tau b_z)_f + a_c - a_f`.
pub fn indi_linear(a_c: &Vec3, bank: &FilteredSignals, mass: f64) -> Result<ThrustCommand, ControlError> {
    thrust_from_vector(bank.thrust_vector + a_c - bank.accel, mass)
}

/// Model-based law `(tau b_z)_c = a_c - g i_z`.
pub fn nonincremental_linear(a_c: &Vec3, gravity: f64, mass: f64) -> Result<ThrustCommand, ControlError> {
    thrust_from_vector(a_c - gravity * i_z(), mass)
}

/// `mu_c = mu_f + J (Omega_dot_c - Omega_dot_f)`.
pub fn indi_angular(rate_deriv_cmd: &Vec3, bank: &FilteredSignals, inertia: &Mat3) -> Vec3 {
    bank.moment + inertia * (rate_deriv_cmd - bank.rate_deriv)
}

/// Model-based law `mu_c = J Omega_dot_c`.
pub fn nonincremental_angular(rate_deriv_cmd: &Vec3, inertia: &Mat3) -> Vec3 {
    inertia * rate_deriv_cmd
}
