//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use indiflight::{Mat3, Vec3, VehicleParams};

/// Jerk and snap of `a = g i_z + tau R i_z` for a rotation moving with
/// body rate `omega` and angular acceleration `omega_dot`, by direct
/// differentiation of `tau b_z`.
pub fn jerk_snap(r: &Mat3, tau: f64, tau_dot: f64, tau_ddot: f64, omega: &Vec3, omega_dot: &Vec3) -> (Vec3, Vec3) {
    let bz = r.column(2).into_owned();
    // b_z' = R (omega x e_z), b_z'' = R (omega x (omega x e_z) + omega_dot x e_z)
    let ez = Vec3::z();
    let bz_dot = r * omega.cross(&ez);
    let bz_ddot = r * (omega.cross(&omega.cross(&ez)) + omega_dot.cross(&ez));
    let jerk = tau_dot * bz + tau * bz_dot;
    let snap = tau_ddot * bz + 2.0 * tau_dot * bz_dot + tau * bz_ddot;
    (jerk, snap)
}

/// First and second derivatives of `atan2(b_x[1], b_x[0])` for the same motion.
pub fn yaw_derivatives(r: &Mat3, omega: &Vec3, omega_dot: &Vec3) -> (f64, f64) {
    let ex = Vec3::x();
    let b = r * ex;
    let bd = r * omega.cross(&ex);
    let bdd = r * (omega.cross(&omega.cross(&ex)) + omega_dot.cross(&ex));
    let (x, y) = (b.x, b.y);
    let (xd, yd) = (bd.x, bd.y);
    let (xdd, ydd) = (bdd.x, bdd.y);
    let rho = x * x + y * y;
    let num = x * yd - y * xd;
    let num_dot = x * ydd - y * xdd;
    let rho_dot = 2.0 * (x * xd + y * yd);
    (num / rho, num_dot / rho - num * rho_dot / (rho * rho))
}

/// Rotor-speed box oracle for the yaw moment reachable at fixed roll and
/// pitch moment and thrust. With those three fixed, the squared speeds move
/// along a single line; gridding the first rotor speed over its full range
/// visits that line, and each grid point is kept when all four speeds are in
/// range. Returns the reachable yaw moments in grid order.
pub fn grid_yaw_moments(mu_x: f64, mu_y: f64, thrust: f64, params: &VehicleParams, points: usize) -> Vec<f64> {
    let (kt, kz) = (params.k_tau, params.k_mu_z);
    let (lx, ly) = (params.arm_x, params.arm_y);
    // roll:  ly kt (u1 - u2 - u3 + u4) = mu_x
    // pitch: lx kt (u1 + u2 - u3 - u4) = mu_y
    // yaw:   kz (-u1 + u2 - u3 + u4)   = mu_z
    // thrust: -kt (u1 + u2 + u3 + u4)  = T
    let a = mu_x / (ly * kt);
    let b = mu_y / (lx * kt);
    let d = -thrust / kt;
    let (lo, hi) = (params.omega_min, params.omega_max);
    let mut out = Vec::new();
    for i in 0..points {
        let w1 = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let u1 = w1 * w1;
        // pitch and thrust: u1 + u2 = (d + b)/2, u3 + u4 = (d - b)/2
        // roll and thrust:  u1 + u4 = (d + a)/2
        let u2 = 0.5 * (d + b) - u1;
        let u4 = 0.5 * (d + a) - u1;
        let u3 = 0.5 * (d - b) - u4;
        let ok = [u2, u3, u4].iter().all(|u| *u >= lo * lo && *u <= hi * hi);
        if ok {
            out.push(kz * (-u1 + u2 - u3 + u4));
        }
    }
    out
}

/// RMS and maximum of a sequence, accumulated in one pass.
pub fn rms_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut sum, mut max) = (0usize, 0.0f64, f64::NEG_INFINITY);
    for v in values {
        n += 1;
        sum += v * v;
        if v > max {
            max = v;
        }
    }
    ((sum / n as f64).sqrt(), max)
}
