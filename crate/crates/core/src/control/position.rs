use crate::flatness::ReferenceSample;
use crate::{ControlGains, Vec3};

/// `a_c = K_x (x_ref - x) + K_v (v_ref - v) + K_a (a_ref - a_f) + a_ref`.
pub fn position_control(reference: &ReferenceSample, x: &Vec3, v: &Vec3, a_f: &Vec3, gains: &ControlGains) -> Vec3 {
    gains.k_x.component_mul(&(reference.position - x))
        + gains.k_v.component_mul(&(reference.velocity - v))
        + gains.k_a.component_mul(&(reference.acceleration - a_f))
        + reference.acceleration
}
