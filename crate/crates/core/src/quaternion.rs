//! Hamilton quaternions and small rotation helpers.

use std::ops::{Mul, Neg};

use thiserror::Error;

use crate::{Mat3, Vec3};

/// Threshold on the horizontal projection of `b_x` below which yaw is undefined.
pub const EPS_YAW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("yaw is undefined: body x-axis is vertical")]
    YawSingular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Pure quaternion with zero scalar part.
    pub fn pure(v: &Vec3) -> Self {
        Self::new(0.0, v.x, v.y, v.z)
    }

    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::IDENTITY;
        }
        let (s, c) = (0.5 * angle).sin_cos();
        let a = axis * (s / n);
        Self::new(c, a.x, a.y, a.z)
    }

    /// Rotation by `angle` about the body z-axis.
    pub fn from_yaw(angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        Self::new(c, 0.0, 0.0, s)
    }

    pub fn vector(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm();
        Self::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn inverse(&self) -> Self {
        let n2 = self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z;
        let c = self.conjugate();
        Self::new(c.w / n2, c.x / n2, c.y / n2, c.z / n2)
    }

    /// Same rotation with a non-negative scalar part.
    pub fn canonical(&self) -> Self {
        if self.w < 0.0 {
            -*self
        } else {
            *self
        }
    }

    /// `q * u * q^-1` for a unit quaternion `q`.
    pub fn rotate(&self, u: &Vec3) -> Vec3 {
        (*self * Self::pure(u) * self.conjugate()).vector()
    }

    /// `q^-1 * u * q`, i.e. the inertial vector `u` expressed in the body frame.
    pub fn rotate_inverse(&self, u: &Vec3) -> Vec3 {
        (self.conjugate() * Self::pure(u) * *self).vector()
    }

    pub fn rotation_matrix(&self) -> Mat3 {
        let Quaternion { w, x, y, z } = *self;
        Mat3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    pub fn from_rotation_matrix(r: &Mat3) -> Self {
        let tr = r.trace();
        let q = if tr > 0.0 {
            let s = 2.0 * (tr + 1.0).sqrt();
            Self::new(0.25 * s, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s)
        } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
            let s = 2.0 * (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt();
            Self::new((r[(2, 1)] - r[(1, 2)]) / s, 0.25 * s, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s)
        } else if r[(1, 1)] > r[(2, 2)] {
            let s = 2.0 * (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt();
            Self::new((r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, 0.25 * s, (r[(1, 2)] + r[(2, 1)]) / s)
        } else {
            let s = 2.0 * (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt();
            Self::new((r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, 0.25 * s)
        };
        q.normalize().canonical()
    }

    /// Heading of the body x-axis, `atan2(b_x^2, b_x^1)`.
    pub fn yaw(&self) -> Result<f64, GeometryError> {
        let bx = self.rotate(&Vec3::x());
        yaw_of_axis(&bx)
    }
}

/// Heading of a body x-axis expressed in the inertial frame.
pub fn yaw_of_axis(bx: &Vec3) -> Result<f64, GeometryError> {
    if bx.x.hypot(bx.y) <= EPS_YAW {
        return Err(GeometryError::YawSingular);
    }
    Ok(bx.y.atan2(bx.x))
}

pub fn yaw_of(q: &Quaternion) -> Result<f64, GeometryError> {
    q.yaw()
}

pub fn quat_mul(p: &Quaternion, q: &Quaternion) -> Quaternion {
    *p * *q
}

pub fn quat_rotate(q: &Quaternion, u: &Vec3) -> Vec3 {
    q.rotate(u)
}

/// Cross-product matrix, `skew(a) b = a x b`.
pub fn skew(a: &Vec3) -> Mat3 {
    Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}
