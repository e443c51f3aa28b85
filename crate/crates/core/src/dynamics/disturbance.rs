//! Synthetic external force and moment models.

use crate::{Vec3, VehicleState};

/// Air density at sea level, kg/m^3.
pub const AIR_DENSITY: f64 = 1.225;

/// External force (inertial, N) and moment (body, N m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DisturbanceState {
    pub force: Vec3,
    pub moment: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyAxis {
    X,
    Y,
    Z,
}

impl BodyAxis {
    pub fn unit(self) -> Vec3 {
        match self {
            BodyAxis::X => Vec3::x(),
            BodyAxis::Y => Vec3::y(),
            BodyAxis::Z => Vec3::z(),
        }
    }
}

/// One breakpoint of a piecewise-linear force schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceKnot {
    pub time: f64,
    pub force: Vec3,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum DisturbanceModel {
    #[default]
    None,
    /// Constant inertial force and body moment active on `[t_on, t_off]`.
    ConstantForce { force: Vec3, moment: Vec3, t_on: f64, t_off: f64 },
    /// Piecewise-linear force through the knots, zero outside their time span.
    WirePull { knots: Vec<ForceKnot> },
    /// Flat plate with normal along a body axis: pressure force along the
    /// normal, `-0.5 rho C_d A (n.v)|n.v| n`, applied at `arm` (body frame).
    DragPlate { area: f64, drag_coefficient: f64, normal: BodyAxis, arm: Vec3 },
    /// Isotropic drag `-(c_lin + c_quad |v|) v`.
    BodyDrag { c_lin: f64, c_quad: f64 },
    /// Sum of several models.
    Composite(Vec<DisturbanceModel>),
}

impl DisturbanceModel {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            DisturbanceModel::None => Ok(()),
            DisturbanceModel::ConstantForce { force, moment, t_on, t_off } => {
                if !(force.iter().chain(moment.iter()).all(|v| v.is_finite()) && t_on <= t_off) {
                    return Err("constant force needs finite values and t_on <= t_off".into());
                }
                Ok(())
            }
            DisturbanceModel::WirePull { knots } => {
                if knots.is_empty() {
                    return Err("wire pull needs at least one knot".into());
                }
                if knots.windows(2).any(|w| !(w[1].time > w[0].time)) {
                    return Err("wire pull knot times must be strictly increasing".into());
                }
                if knots.iter().any(|k| !k.time.is_finite() || k.force.iter().any(|v| !v.is_finite())) {
                    return Err("wire pull knots must be finite".into());
                }
                Ok(())
            }
            DisturbanceModel::DragPlate { area, drag_coefficient, arm, .. } => {
                if !(*area >= 0.0 && *drag_coefficient >= 0.0 && area.is_finite() && drag_coefficient.is_finite()) {
                    return Err("drag plate area and coefficient must be non-negative".into());
                }
                if arm.iter().any(|v| !v.is_finite()) {
                    return Err("drag plate arm must be finite".into());
                }
                Ok(())
            }
            DisturbanceModel::BodyDrag { c_lin, c_quad } => {
                if !(*c_lin >= 0.0 && *c_quad >= 0.0 && c_lin.is_finite() && c_quad.is_finite()) {
                    return Err("body drag coefficients must be non-negative".into());
                }
                Ok(())
            }
            DisturbanceModel::Composite(parts) => parts.iter().try_for_each(|p| p.validate()),
        }
    }
}

pub fn disturbance_eval(model: &DisturbanceModel, state: &VehicleState, t: f64) -> DisturbanceState {
    match model {
        DisturbanceModel::None => DisturbanceState::default(),
        DisturbanceModel::ConstantForce { force, moment, t_on, t_off } => {
            if t >= *t_on && t <= *t_off {
                DisturbanceState { force: *force, moment: *moment }
            } else {
                DisturbanceState::default()
            }
        }
        DisturbanceModel::WirePull { knots } => DisturbanceState { force: schedule_force(knots, t), moment: Vec3::zeros() },
        DisturbanceModel::DragPlate { area, drag_coefficient, normal, arm } => {
            let n = state.attitude.rotate(&normal.unit());
            let vn = n.dot(&state.velocity);
            let force = -0.5 * AIR_DENSITY * drag_coefficient * area * vn * vn.abs() * n;
            let moment = arm.cross(&state.attitude.rotate_inverse(&force));
            DisturbanceState { force, moment }
        }
        DisturbanceModel::BodyDrag { c_lin, c_quad } => {
            let v = state.velocity;
            DisturbanceState { force: -(c_lin + c_quad * v.norm()) * v, moment: Vec3::zeros() }
        }
        DisturbanceModel::Composite(parts) => parts.iter().fold(DisturbanceState::default(), |acc, p| {
            let d = disturbance_eval(p, state, t);
            DisturbanceState { force: acc.force + d.force, moment: acc.moment + d.moment }
        }),
    }
}

fn schedule_force(knots: &[ForceKnot], t: f64) -> Vec3 {
    let (Some(first), Some(last)) = (knots.first(), knots.last()) else {
        return Vec3::zeros();
    };
    if t < first.time || t > last.time {
        return Vec3::zeros();
    }
    let i = knots.partition_point(|k| k.time <= t);
    if i == 0 {
        return first.force;
    }
    if i == knots.len() {
        return last.force;
    }
    let (a, b) = (&knots[i - 1], &knots[i]);
    let s = (t - a.time) / (b.time - a.time);
    a.force + (b.force - a.force) * s
}
