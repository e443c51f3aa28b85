//! Flat outputs and the maps from jerk/snap and yaw derivatives to body
//! rates and angular accelerations.

use nalgebra::RowVector3;
use thiserror::Error;

use crate::quaternion::{skew, EPS_YAW};
use crate::{i_z, Mat3, Mat4, Vec3, Vec4};

/// Minimum `|a - g i_z|` for which a thrust direction is defined, m/s^2.
pub const EPS_THRUST: f64 = 1e-3;
/// Largest accepted condition number of the rate/acceleration map.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FlatnessError {
    #[error("reference acceleration is within {EPS_THRUST} m/s^2 of free fall")]
    FreeFallSingular,
    #[error("yaw is undefined for the reference attitude")]
    YawSingular,
    #[error("flatness map is singular (condition number {0:.3e})")]
    Singular(f64),
}

/// Flat outputs and their derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReferenceSample {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub jerk: Vec3,
    pub snap: Vec3,
    pub yaw: f64,
    pub yaw_rate: f64,
    pub yaw_accel: f64,
}

impl ReferenceSample {
    pub fn hover(position: Vec3, yaw: f64) -> Self {
        Self { position, yaw, ..Default::default() }
    }

    pub fn is_finite(&self) -> bool {
        [self.position, self.velocity, self.acceleration, self.jerk, self.snap]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
            && self.yaw.is_finite()
            && self.yaw_rate.is_finite()
            && self.yaw_accel.is_finite()
    }
}

/// Body-rate and angular-acceleration feedforward.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FlatnessFeedforward {
    pub rate: Vec3,
    pub rate_deriv: Vec3,
    /// carried for completeness, not used by the controller
    pub thrust_rate: f64,
    /// carried for completeness, not used by the controller
    pub thrust_accel: f64,
}

/// Attitude and specific thrust that realise `a_ref` with heading `yaw`.
pub fn reference_attitude(accel: &Vec3, yaw: f64, gravity: f64) -> Result<(Mat3, f64), FlatnessError> {
    let f = accel - gravity * i_z();
    let mag = f.norm();
    if !(mag > EPS_THRUST) {
        return Err(FlatnessError::FreeFallSingular);
    }
    let tau = -mag;
    let bz = f / tau;
    let (s, c) = yaw.sin_cos();
    let n = Vec3::new(s, -c, 0.0);
    let cross = bz.cross(&n);
    let len = cross.norm();
    if len <= EPS_YAW {
        return Err(FlatnessError::YawSingular);
    }
    let mut bx = cross / len;
    if bx.dot(&Vec3::new(c, s, 0.0)) < 0.0 {
        bx = -bx;
    }
    let by = bz.cross(&bx);
    Ok((Mat3::from_columns(&[bx, by, bz]), tau))
}

/// Row vector `S` with `yaw_rate = S * Omega`.
pub fn yaw_rate_map(r: &Mat3) -> Result<RowVector3<f64>, FlatnessError> {
    let (bx, by, bz) = (r.column(0), r.column(1), r.column(2));
    let rho = bx[0] * bx[0] + bx[1] * bx[1];
    if rho.sqrt() <= EPS_YAW {
        return Err(FlatnessError::YawSingular);
    }
    let u = RowVector3::new(-bx[1], bx[0], 0.0) / rho;
    let m = Mat3::new(0.0, -bz[0], by[0], 0.0, -bz[1], by[1], 0.0, 0.0, 0.0);
    Ok(u * m)
}

/// Time derivative of `S` along the rotation `R_dot = R [Omega]x`.
pub fn yaw_rate_map_derivative(r: &Mat3, omega: &Vec3) -> Result<RowVector3<f64>, FlatnessError> {
    let s = yaw_rate_map(r)?;
    let (bx, by, bz) = (r.column(0).into_owned(), r.column(1).into_owned(), r.column(2).into_owned());
    let bx_dot = omega.z * by - omega.y * bz;
    let by_dot = -omega.z * bx + omega.x * bz;
    let bz_dot = omega.y * bx - omega.x * by;
    let rho = bx[0] * bx[0] + bx[1] * bx[1];
    let rho_dot = 2.0 * (bx[0] * bx_dot[0] + bx[1] * bx_dot[1]);
    let u = RowVector3::new(-bx[1], bx[0], 0.0);
    let u_dot = RowVector3::new(-bx_dot[1], bx_dot[0], 0.0);
    let m = Mat3::new(0.0, -bz[0], by[0], 0.0, -bz[1], by[1], 0.0, 0.0, 0.0);
    let m_dot = Mat3::new(0.0, -bz_dot[0], by_dot[0], 0.0, -bz_dot[1], by_dot[1], 0.0, 0.0, 0.0);
    Ok((u_dot * m + u * m_dot) / rho - s * (rho_dot / rho))
}

/// `[i_z]x^T`, so that `iz_cross_t() * Omega = (Omega_y, -Omega_x, 0)`.
fn iz_cross_t() -> Mat3 {
    skew(&i_z()).transpose()
}

fn flatness_matrix(r: &Mat3, tau: f64) -> Result<Mat4, FlatnessError> {
    let s = yaw_rate_map(r)?;
    let top = r * iz_cross_t() * tau;
    let mut a = Mat4::zeros();
    a.fixed_view_mut::<3, 3>(0, 0).copy_from(&top);
    a.fixed_view_mut::<3, 1>(0, 3).copy_from(&r.column(2));
    a.fixed_view_mut::<1, 3>(3, 0).copy_from(&s);
    Ok(a)
}

fn solve(a: &Mat4, rhs: &Vec4) -> Result<(Vec3, f64), FlatnessError> {
    let sv = a.singular_values();
    let (max, min) = (sv.max(), sv.min());
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(cond <= MAX_CONDITION) {
        return Err(FlatnessError::Singular(cond));
    }
    let x = a.lu().solve(rhs).ok_or(FlatnessError::Singular(f64::INFINITY))?;
    Ok((Vec3::new(x[0], x[1], x[2]), x[3]))
}

/// Body rate and specific-thrust rate from jerk and yaw rate.
pub fn angular_rate_ref(sample: &ReferenceSample, r: &Mat3, tau: f64) -> Result<(Vec3, f64), FlatnessError> {
    let a = flatness_matrix(r, tau)?;
    let j = sample.jerk;
    solve(&a, &Vec4::new(j.x, j.y, j.z, sample.yaw_rate))
}

/// Angular acceleration and specific-thrust second derivative from snap and yaw acceleration.
pub fn angular_accel_ref(
    sample: &ReferenceSample,
    r: &Mat3,
    tau: f64,
    tau_dot: f64,
    omega: &Vec3,
) -> Result<(Vec3, f64), FlatnessError> {
    let a = flatness_matrix(r, tau)?;
    let w_cross = iz_cross_t() * omega;
    let transport = r * ((2.0 * tau_dot) * w_cross + tau * omega.cross(&w_cross));
    let top = sample.snap - transport;
    let s_dot = yaw_rate_map_derivative(r, omega)?;
    let bottom = sample.yaw_accel - (s_dot * omega)[0];
    solve(&a, &Vec4::new(top.x, top.y, top.z, bottom))
}

/// Feedforward from the reference alone: attitude and thrust from
/// [`reference_attitude`], then the rate map, then the acceleration map
/// evaluated at the reference rate.
pub fn feedforward(sample: &ReferenceSample, gravity: f64) -> Result<FlatnessFeedforward, FlatnessError> {
    let (r, tau) = reference_attitude(&sample.acceleration, sample.yaw, gravity)?;
    let (rate, tau_dot) = angular_rate_ref(sample, &r, tau)?;
    let (rate_deriv, tau_ddot) = angular_accel_ref(sample, &r, tau, tau_dot, &rate)?;
    Ok(FlatnessFeedforward { rate, rate_deriv, thrust_rate: tau_dot, thrust_accel: tau_ddot })
}

/// Feedforward evaluated at a measured attitude, specific thrust and rate.
pub fn feedforward_at_state(
    sample: &ReferenceSample,
    r: &Mat3,
    tau: f64,
    tau_dot: f64,
    omega: &Vec3,
) -> Result<FlatnessFeedforward, FlatnessError> {
    let (rate, thrust_rate) = angular_rate_ref(sample, r, tau)?;
    let (rate_deriv, thrust_accel) = angular_accel_ref(sample, r, tau, tau_dot, omega)?;
    Ok(FlatnessFeedforward { rate, rate_deriv, thrust_rate, thrust_accel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const G: f64 = 9.81;

    #[test]
    fn hover_attitude_is_identity() {
        let (r, tau) = reference_attitude(&Vec3::zeros(), 0.0, G).unwrap();
        assert_relative_eq!(r, Mat3::identity(), epsilon = 1e-15);
        assert_eq!(tau, -G);
    }

    #[test]
    fn climb_doubles_thrust() {
        let (r, tau) = reference_attitude(&Vec3::new(0.0, 0.0, -G), 0.3, G).unwrap();
        assert_relative_eq!(tau, -2.0 * G);
        assert_relative_eq!(r.column(2).into_owned(), i_z(), epsilon = 1e-15);
    }

    #[test]
    fn free_fall_rejected() {
        assert_eq!(reference_attitude(&Vec3::new(0.0, 0.0, G), 0.0, G), Err(FlatnessError::FreeFallSingular));
    }

    #[test]
    fn yaw_degenerate_rejected() {
        // thrust axis horizontal and aligned with the yaw-plane normal
        let a = G * i_z() + Vec3::new(0.0, 5.0, 0.0);
        assert_eq!(reference_attitude(&a, 0.0, G), Err(FlatnessError::YawSingular));
    }

    #[test]
    fn hover_rate_anchors() {
        let r = Mat3::identity();
        let s = ReferenceSample { jerk: Vec3::x(), ..Default::default() };
        let (w, td) = angular_rate_ref(&s, &r, -G).unwrap();
        assert_relative_eq!(w, Vec3::new(0.0, -1.0 / G, 0.0), epsilon = 1e-15);
        assert_relative_eq!(td, 0.0, epsilon = 1e-15);

        let s = ReferenceSample { jerk: Vec3::z(), ..Default::default() };
        let (w, td) = angular_rate_ref(&s, &r, -G).unwrap();
        assert_relative_eq!(w, Vec3::zeros(), epsilon = 1e-15);
        assert_relative_eq!(td, 1.0, epsilon = 1e-15);

        let s = ReferenceSample { snap: Vec3::x(), ..Default::default() };
        let (wd, tdd) = angular_accel_ref(&s, &r, -G, 0.0, &Vec3::zeros()).unwrap();
        assert_relative_eq!(wd, Vec3::new(0.0, -1.0 / G, 0.0), epsilon = 1e-15);
        assert_relative_eq!(tdd, 0.0, epsilon = 1e-15);

        let zero = angular_accel_ref(&ReferenceSample::default(), &r, -G, 0.0, &Vec3::zeros()).unwrap();
        assert_eq!(zero, (Vec3::zeros(), 0.0));
    }

    #[test]
    fn zero_thrust_is_singular() {
        let r = Mat3::identity();
        assert!(matches!(angular_rate_ref(&ReferenceSample::default(), &r, 0.0), Err(FlatnessError::Singular(_))));
    }
}
