//! Motor-speed allocation: nonlinear inversion with saturation handling,
//! and the linearized incremental inversion used as a baseline.

use super::ControlError;
use crate::filters::FilteredSignals;
use crate::{Vec3, Vec4, VehicleParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationSettings {
    pub max_iterations: usize,
    /// relative residual tolerance
    pub tolerance: f64,
    /// largest accepted relative increase of |T_c| when resolving saturation
    pub max_thrust_increase: f64,
}

impl Default for AllocationSettings {
    fn default() -> Self {
        Self { max_iterations: 20, tolerance: 1e-8, max_thrust_increase: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Saturation {
    None,
    /// yaw moment moved to the nearest feasible value
    YawClamped,
    /// thrust changed so the feasible yaw interval is a single point
    ThrustAdjusted,
    /// no feasible point; yaw at the interval midpoint and speeds clipped
    Clipped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub speeds: Vec4,
    pub moment: Vec3,
    pub thrust: f64,
    pub saturation: Saturation,
    pub iterations: usize,
    /// Newton failed and the closed form was used instead
    pub fallback: bool,
}

fn target_vec(moment: &Vec3, thrust: f64) -> Vec4 {
    Vec4::new(moment.x, moment.y, moment.z, thrust)
}

fn residual(w: &Vec4, current: &Vec4, target: &Vec4, params: &VehicleParams) -> Vec4 {
    params.g1() * w.component_mul(w) + params.g2() * ((w - current) / params.motor_time_constant) - target
}

/// Squared speeds `G1^-1 [mu; T]`.
fn squared_speeds(moment: &Vec3, thrust: f64, params: &VehicleParams) -> Vec4 {
    let inv = params.g1().try_inverse().expect("validated G1");
    inv * target_vec(moment, thrust)
}

/// Closed-form speeds ignoring rotor acceleration; negative squares map to zero.
pub fn closed_form_speeds(moment: &Vec3, thrust: f64, params: &VehicleParams) -> Vec4 {
    squared_speeds(moment, thrust, params).map(|u| u.max(0.0).sqrt())
}

/// Damped Newton solve of `G1 w^2 + G2 (w - w_now)/tau_m = [mu; T]`.
pub fn newton_solve(
    moment: &Vec3,
    thrust: f64,
    current: &Vec4,
    params: &VehicleParams,
    settings: &AllocationSettings,
) -> Result<(Vec4, usize), ControlError> {
    let target = target_vec(moment, thrust);
    let floor = 0.25 * params.omega_min;
    let mut w = closed_form_speeds(moment, thrust, params).map(|x| x.max(floor));
    let scale = target.amax().max(1e-3);
    let g1 = params.g1();
    let g2_tau = params.g2() / params.motor_time_constant;
    let mut r = residual(&w, current, &target, params);
    for it in 0..=settings.max_iterations {
        if r.amax() <= settings.tolerance * scale {
            return Ok((w, it));
        }
        if it == settings.max_iterations {
            break;
        }
        let jac = g1 * nalgebra::Matrix4::from_diagonal(&(2.0 * w)) + g2_tau;
        let Some(step) = jac.lu().solve(&r) else {
            break;
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = (w - step * alpha).map(|x| x.max(floor));
            let rc = residual(&cand, current, &target, params);
            if rc.norm() < r.norm() {
                w = cand;
                r = rc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(ControlError::NoConvergence(r.amax()))
}

/// Yaw-moment interval `[lower, upper]` for which every squared speed from
/// `G1^-1 [mu; T]` lies in `[w_min^2, w_max^2]`, enumerating both signs of
/// the roll/pitch terms.
pub fn yaw_moment_bounds(mu_x: f64, mu_y: f64, thrust: f64, params: &VehicleParams) -> (f64, f64) {
    let (kt, kz) = (params.k_tau, params.k_mu_z);
    let lo = 4.0 * kt * params.omega_min * params.omega_min;
    let hi = 4.0 * kt * params.omega_max * params.omega_max;
    let diff = mu_y / params.arm_x - mu_x / params.arm_y;
    let sum = mu_y / params.arm_x + mu_x / params.arm_y;
    let r = kz / kt;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for sign in [1.0, -1.0] {
        lower = lower.max(r * (lo + thrust + sign * diff)).max(-r * (hi + thrust + sign * sum));
        upper = upper.min(r * (hi + thrust + sign * diff)).min(-r * (lo + thrust + sign * sum));
    }
    (lower, upper)
}

/// Range of `T` for which the yaw interval is non-empty, if any.
fn feasible_thrust_range(mu_x: f64, mu_y: f64, params: &VehicleParams) -> Option<(f64, f64)> {
    let kt = params.k_tau;
    let (lo, hi) = (params.omega_min.powi(2), params.omega_max.powi(2));
    let a = mu_x / (params.arm_y * kt);
    let b = mu_y / (params.arm_x * kt);
    let span = 2.0 * (hi - lo);
    if (a - b).abs() > span || (a + b).abs() > span {
        return None;
    }
    let m = a.abs().max(b.abs());
    // D = -T / k_tau = sum of squared speeds
    let (d_lo, d_hi) = (4.0 * lo + m, 4.0 * hi - m);
    if d_lo > d_hi {
        return None;
    }
    Some((-kt * d_hi, -kt * d_lo))
}

fn in_limits(w: &Vec4, params: &VehicleParams) -> bool {
    w.iter().all(|x| x.is_finite() && *x >= params.omega_min && *x <= params.omega_max)
}

fn clip(w: Vec4, params: &VehicleParams) -> Vec4 {
    w.map(|x| x.clamp(params.omega_min, params.omega_max))
}

/// Solves for motor speed commands, resolving saturation by adjusting the
/// yaw moment, then the thrust, then clipping.
pub fn allocate(
    moment: &Vec3,
    thrust: f64,
    current: &Vec4,
    params: &VehicleParams,
    settings: &AllocationSettings,
) -> Allocation {
    let (newton, iterations, fallback) = match newton_solve(moment, thrust, current, params, settings) {
        Ok((w, it)) => (w, it, false),
        Err(_) => (closed_form_speeds(moment, thrust, params), settings.max_iterations, true),
    };
    if in_limits(&newton, params) {
        return Allocation { speeds: newton, moment: *moment, thrust, saturation: Saturation::None, iterations, fallback };
    }

    let (lower, upper) = yaw_moment_bounds(moment.x, moment.y, thrust, params);
    if lower <= upper {
        let m = Vec3::new(moment.x, moment.y, moment.z.clamp(lower, upper));
        let speeds = clip(closed_form_speeds(&m, thrust, params), params);
        return Allocation { speeds, moment: m, thrust, saturation: Saturation::YawClamped, iterations, fallback };
    }

    if let Some((t_lo, t_hi)) = feasible_thrust_range(moment.x, moment.y, params) {
        let t_new = thrust.clamp(t_lo, t_hi);
        if t_new >= thrust * (1.0 + settings.max_thrust_increase) {
            let (l, u) = yaw_moment_bounds(moment.x, moment.y, t_new, params);
            let mz = moment.z.clamp(l.min(u), u.max(l));
            let m = Vec3::new(moment.x, moment.y, mz);
            let speeds = clip(closed_form_speeds(&m, t_new, params), params);
            return Allocation {
                speeds,
                moment: m,
                thrust: t_new,
                saturation: Saturation::ThrustAdjusted,
                iterations,
                fallback,
            };
        }
    }

    let m = Vec3::new(moment.x, moment.y, 0.5 * (lower + upper));
    let lo2 = params.omega_min.powi(2);
    let hi2 = params.omega_max.powi(2);
    let speeds = squared_speeds(&m, thrust, params).map(|u| u.clamp(lo2, hi2).sqrt());
    Allocation { speeds, moment: m, thrust, saturation: Saturation::Clipped, iterations, fallback }
}

/// Linearized incremental inversion with a one-sample memory of the
/// previous speed increment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearizedAllocator {
    prev_increment: Vec4,
}

impl LinearizedAllocator {
    pub fn allocate(&mut self, moment: &Vec3, thrust: f64, bank: &FilteredSignals, params: &VehicleParams, dt: f64) -> Vec4 {
        let w_f = bank.motor_speeds;
        let g2_dt = params.g2() / dt;
        let jac = params.g1() * nalgebra::Matrix4::from_diagonal(&(2.0 * w_f)) + g2_dt;
        let rhs = target_vec(&(moment - bank.moment), thrust - bank.thrust) + g2_dt * self.prev_increment;
        let inc = jac.lu().solve(&rhs).unwrap_or_else(Vec4::zeros);
        let w = clip(w_f + inc, params);
        self.prev_increment = w - w_f;
        w
    }
}

/// Stateless single-tick form of [`LinearizedAllocator::allocate`] with a
/// given previous increment.
pub fn allocate_linearized(
    moment: &Vec3,
    thrust: f64,
    bank: &FilteredSignals,
    params: &VehicleParams,
    dt: f64,
    prev_increment: &Vec4,
) -> Vec4 {
    let mut a = LinearizedAllocator { prev_increment: *prev_increment };
    a.allocate(moment, thrust, bank, params, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::actuation;
    use approx::assert_relative_eq;

    #[test]
    fn hover_fixed_point() {
        let p = VehicleParams::default();
        let w0 = Vec4::repeat(p.hover_speed());
        let a = allocate(&Vec3::zeros(), -p.mass * p.gravity, &w0, &p, &AllocationSettings::default());
        assert_eq!(a.saturation, Saturation::None);
        assert_relative_eq!(a.speeds, w0, max_relative = 1e-12);
    }

    #[test]
    fn unsaturated_round_trip() {
        let p = VehicleParams::default();
        let cur = Vec4::new(700.0, 820.0, 790.0, 900.0);
        let mu = Vec3::new(0.02, -0.015, 0.004);
        let t = -7.0;
        let a = allocate(&mu, t, &cur, &p, &AllocationSettings::default());
        assert_eq!(a.saturation, Saturation::None);
        let (m, th) = actuation(&a.speeds, &((a.speeds - cur) / p.motor_time_constant), &p);
        assert!((m - mu).amax() < 1e-6 && (th - t).abs() < 1e-6);
    }

    #[test]
    fn yaw_clamp_resolves_excess_yaw() {
        let p = VehicleParams::default();
        let w0 = Vec4::repeat(p.hover_speed());
        let a = allocate(&Vec3::new(0.0, 0.0, 2.0), -p.mass * p.gravity, &w0, &p, &AllocationSettings::default());
        assert_eq!(a.saturation, Saturation::YawClamped);
        assert!(a.moment.z < 2.0);
        assert!(a.speeds.iter().all(|w| *w >= p.omega_min - 1e-9 && *w <= p.omega_max + 1e-9));
    }

    #[test]
    fn bounds_match_motor_boxes() {
        let p = VehicleParams::default();
        let (mx, my, t) = (0.05, -0.08, -9.0);
        let (l, u) = yaw_moment_bounds(mx, my, t, &p);
        assert!(l < u);
        for mz in [l, u] {
            let s = squared_speeds(&Vec3::new(mx, my, mz), t, &p);
            let lo = p.omega_min.powi(2);
            let hi = p.omega_max.powi(2);
            assert!(s.iter().all(|x| *x >= lo * (1.0 - 1e-9) && *x <= hi * (1.0 + 1e-9)));
            assert!(s.iter().any(|x| (x - lo).abs() < 1e-6 * hi || (x - hi).abs() < 1e-6 * hi));
        }
    }

    #[test]
    fn linearized_zero_increment() {
        let p = VehicleParams::default();
        let w = Vec4::new(800.0, 810.0, 790.0, 805.0);
        let out = p.g1() * w.component_mul(&w);
        let bank = FilteredSignals {
            accel: Vec3::zeros(),
            rate: Vec3::zeros(),
            rate_deriv: Vec3::zeros(),
            motor_speeds: w,
            thrust_vector: Vec3::zeros(),
            moment: Vec3::new(out[0], out[1], out[2]),
            thrust: out[3],
            specific_thrust: out[3] / p.mass,
            specific_thrust_rate: 0.0,
        };
        let wc = allocate_linearized(&bank.moment, bank.thrust, &bank, &p, 5e-4, &Vec4::zeros());
        assert_relative_eq!(wc, w, max_relative = 1e-12);
    }
}
