//! Measurement model sampled at the control rate.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{actuation, disturbance::DisturbanceState};
use crate::{i_z, Quaternion, Vec3, Vec4, VehicleParams, VehicleState};

/// Standard deviations of zero-mean Gaussian measurement noise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseConfig {
    /// m/s^2
    pub accel: f64,
    /// rad/s
    pub gyro: f64,
    /// rad/s
    pub motor_speed: f64,
    /// m
    pub position: f64,
    /// m/s
    pub velocity: f64,
    /// rad, per axis of a small rotation
    pub attitude: f64,
}

impl NoiseConfig {
    pub fn is_zero(&self) -> bool {
        [self.accel, self.gyro, self.motor_speed, self.position, self.velocity, self.attitude]
            .iter()
            .all(|s| *s == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSample {
    /// specific acceleration in the body frame, m/s^2
    pub accel_body: Vec3,
    /// rad/s
    pub gyro: Vec3,
    /// rad/s
    pub motor_speeds: Vec4,
    pub attitude: Quaternion,
    pub position: Vec3,
    pub velocity: Vec3,
}

/// Inertial acceleration from the current state and disturbance.
pub fn inertial_acceleration(state: &VehicleState, dist: &DisturbanceState, params: &VehicleParams) -> Vec3 {
    // Thrust has no rotor-acceleration term, so the motor acceleration is irrelevant here.
    let (_, thrust) = actuation(&state.motor_speeds, &Vec4::zeros(), params);
    let bz = state.attitude.rotate(&Vec3::z());
    params.gravity * i_z() + (thrust / params.mass) * bz + dist.force / params.mass
}

pub fn sense<R: Rng + ?Sized>(
    state: &VehicleState,
    dist: &DisturbanceState,
    params: &VehicleParams,
    noise: &NoiseConfig,
    rng: &mut R,
) -> SensorSample {
    let a = inertial_acceleration(state, dist, params);
    let accel_body = state.attitude.rotate_inverse(&(a - params.gravity * i_z()));
    let mut sample = SensorSample {
        accel_body,
        gyro: state.body_rate,
        motor_speeds: state.motor_speeds,
        attitude: state.attitude,
        position: state.position,
        velocity: state.velocity,
    };
    if noise.is_zero() {
        return sample;
    }
    sample.accel_body += gaussian3(rng, noise.accel);
    sample.gyro += gaussian3(rng, noise.gyro);
    sample.motor_speeds += Vec4::from_fn(|_, _| noise.motor_speed * normal(rng));
    sample.position += gaussian3(rng, noise.position);
    sample.velocity += gaussian3(rng, noise.velocity);
    let tilt = gaussian3(rng, noise.attitude);
    let dq = Quaternion::from_axis_angle(&tilt, tilt.norm());
    sample.attitude = (state.attitude * dq).normalize();
    sample
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn gaussian3<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> Vec3 {
    Vec3::new(normal(rng), normal(rng), normal(rng)) * sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hover_reads_minus_g() {
        let p = VehicleParams::default();
        let s = VehicleState::hover(&p, Vec3::zeros());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = sense(&s, &DisturbanceState::default(), &p, &NoiseConfig::default(), &mut rng);
        assert_relative_eq!(m.accel_body, Vec3::new(0.0, 0.0, -p.gravity), epsilon = 1e-12);
    }

    #[test]
    fn free_fall_reads_zero() {
        let p = VehicleParams::default();
        let mut s = VehicleState::hover(&p, Vec3::zeros());
        // Rotors at the lower limit still push; remove the thrust coefficient instead.
        let p0 = VehicleParams { k_tau: 0.0, ..p.clone() };
        s.motor_speeds = Vec4::repeat(p.omega_min);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = sense(&s, &DisturbanceState::default(), &p0, &NoiseConfig::default(), &mut rng);
        assert_eq!(m.accel_body, Vec3::zeros());
    }

    #[test]
    fn noisy_samples_repeat_with_seed() {
        let p = VehicleParams::default();
        let s = VehicleState::hover(&p, Vec3::zeros());
        let noise = NoiseConfig { accel: 0.1, gyro: 0.01, motor_speed: 5.0, position: 1e-3, velocity: 1e-2, attitude: 1e-3 };
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10).map(|_| sense(&s, &DisturbanceState::default(), &p, &noise, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }
}
