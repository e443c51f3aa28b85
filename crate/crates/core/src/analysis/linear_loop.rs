//! Closed-loop transfer functions of the pitch/x-axis cascade linearized
//! about hover.
//!
//! Plant: `alpha = (M mu_c + mu_ext)/J`, `a_x = -g theta + f_ext/m`. The
//! motor lag is `M = 1/(tau_m s + 1)` and every measurement used by an
//! increment passes through the Butterworth `H = w^2/(s^2 + sqrt(2) w s + w^2)`.
//! The controller's effectiveness is off by the ratio `delta`.

use super::poly::Polynomial;
use super::tf::RationalTf;
use crate::{ControlGains, VehicleParams};

pub const DEFAULT_CUTOFF: f64 = 188.5;

/// Scalars of the linearized loop.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub gravity: f64,
    pub mass: f64,
    /// pitch inertia `J_yy`
    pub inertia: f64,
    pub motor_time_constant: f64,
    pub filter_cutoff: f64,
    /// attitude gain `k_theta`
    pub k_theta: f64,
    /// rate gain `k_q`
    pub k_q: f64,
    pub k_x: f64,
    pub k_v: f64,
    pub k_a: f64,
    /// linearized control effectiveness `8 w0 l_x k_tau`
    pub k_g: f64,
}

impl LinearModel {
    /// Pitch-axis (x-translation) elements of the parameter and gain sets.
    pub fn from_params(params: &VehicleParams, gains: &ControlGains, filter_cutoff: f64) -> Self {
        Self {
            gravity: params.gravity,
            mass: params.mass,
            inertia: params.inertia[(1, 1)],
            motor_time_constant: params.motor_time_constant,
            filter_cutoff,
            k_theta: gains.k_xi.y,
            k_q: gains.k_omega.y,
            k_x: gains.k_x.x,
            k_v: gains.k_v.x,
            k_a: gains.k_a.x,
            k_g: 8.0 * params.hover_speed() * params.arm_x * params.k_tau,
        }
    }

    pub fn motor_den(&self) -> Polynomial {
        Polynomial::new(vec![1.0, self.motor_time_constant])
    }

    pub fn filter_den(&self) -> Polynomial {
        let w = self.filter_cutoff;
        Polynomial::new(vec![w * w, std::f64::consts::SQRT_2 * w, 1.0])
    }

    pub fn filter_num(&self) -> Polynomial {
        Polynomial::constant(self.filter_cutoff * self.filter_cutoff)
    }

    pub fn motor(&self) -> RationalTf {
        RationalTf::new(Polynomial::constant(1.0), self.motor_den())
    }

    pub fn filter(&self) -> RationalTf {
        RationalTf::new(self.filter_num(), self.filter_den())
    }
}

impl Default for LinearModel {
    fn default() -> Self {
        Self::from_params(&VehicleParams::default(), &ControlGains::default(), DEFAULT_CUTOFF)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopOptions {
    pub delta: f64,
    pub incremental: bool,
    pub feedforward: bool,
}

impl Default for LoopOptions {
    fn default() -> Self {
        Self { delta: 1.0, incremental: true, feedforward: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopTransferFunctions {
    /// angular acceleration per command
    pub alpha_per_cmd: RationalTf,
    /// angular acceleration per external moment
    pub alpha_per_moment: RationalTf,
    /// acceleration per acceleration reference, position loop open
    pub accel_per_ref: RationalTf,
    /// acceleration per acceleration reference with the full position loop
    pub accel_per_ref_closed: RationalTf,
    /// position per external force
    pub position_per_force: RationalTf,
    /// position per external moment
    pub position_per_moment: RationalTf,
}

/// Assembles the closed-loop transfer functions.
pub fn build_linear_loop(model: &LinearModel, opts: &LoopOptions) -> LoopTransferFunctions {
    let s = Polynomial::s();
    let s2 = s.pow(2);
    let md = model.motor_den();
    let hd = model.filter_den();
    let hn = model.filter_num();
    let delta = opts.delta;
    let iota = if opts.incremental { 1.0 } else { 0.0 };
    let phi = if opts.feedforward { 1.0 } else { 0.0 };
    let (kt, kq) = (model.k_theta, model.k_q);
    let j = model.inertia;

    let mdhd = &md * &hd;
    let inner = &mdhd + &hn.scale(iota * (delta - 1.0));
    let rejection = &mdhd - &hn.scale(iota);

    let alpha_per_cmd = if opts.incremental {
        RationalTf::new(hd.scale(delta), inner.clone())
    } else {
        RationalTf::new(Polynomial::constant(delta), md.clone())
    };
    let alpha_per_moment = RationalTf::new(rejection.clone(), inner.scale(j));

    // theta * Q = delta H_d (k_theta theta_c + phi (k_q q_ref + alpha_ref)) + (M_d H_d - iota H_n) mu / J
    let q = &(&(&s2 * &inner) + &hd.scale(delta * kt)) + &(&hn * &s).scale(delta * kq);
    let lead = &(&s2 + &s.scale(kq)).scale(phi) + &Polynomial::constant(kt);
    let accel_per_ref = RationalTf::new(&hd.scale(delta) * &lead, q.clone());

    let cn = &(&Polynomial::new(vec![model.k_x, model.k_v]) * &hd) + &(&hn * &s2).scale(model.k_a);
    let den = &(&q * &s2) + &cn.scale(delta * kt);
    let p_ref = Polynomial::new(vec![model.k_x, model.k_v, 1.0 + model.k_a]);
    let closed_num = &hd.scale(delta) * &(&p_ref.scale(kt) + &(&s2 * &(&s2 + &s.scale(kq))).scale(phi));
    let accel_per_ref_closed = RationalTf::new(closed_num, den.clone());

    let position_per_force = RationalTf::new(&q - &hn.scale(iota * delta * kt), den.scale(model.mass));
    let position_per_moment = RationalTf::new(rejection.scale(-model.gravity), den.scale(j));

    LoopTransferFunctions {
        alpha_per_cmd,
        alpha_per_moment,
        accel_per_ref,
        accel_per_ref_closed,
        position_per_force,
        position_per_moment,
    }
}
