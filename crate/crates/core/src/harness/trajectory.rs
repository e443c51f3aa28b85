//! Built-in reference trajectories.

use crate::analysis::tracking::{tanh_accel_reference, TANH_OFFSET, TANH_RATE};
use crate::flatness::ReferenceSample;
use crate::Vec3;

/// Constants of the multi-sinusoid roulette curve. `r6` is listed with the
/// curve's published constants but does not enter the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouletteParams {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub r5: f64,
    pub r6: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub rz: f64,
}

impl Default for RouletteParams {
    fn default() -> Self {
        Self { r1: 6.0, r2: 1.8, r3: 0.6, r4: -2.25, r5: -0.3, r6: -0.45, k1: 0.28, k2: 2.8, k3: 1.4, rz: -1.5 }
    }
}

impl RouletteParams {
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.k1
    }
}

/// `d^n/dt^n cos(k t)` and `d^n/dt^n sin(k t)`.
fn dcos(k: f64, t: f64, n: i32) -> f64 {
    k.powi(n) * (k * t + n as f64 * std::f64::consts::FRAC_PI_2).cos()
}

fn dsin(k: f64, t: f64, n: i32) -> f64 {
    k.powi(n) * (k * t + n as f64 * std::f64::consts::FRAC_PI_2).sin()
}

/// n-th derivative of the roulette position.
pub fn roulette_derivative(p: &RouletteParams, t: f64, n: i32) -> Vec3 {
    let x = p.r1 * dcos(p.k1, t, n) + p.r2 * dcos(p.k2, t, n) + p.r3 * dsin(p.k3, t, n);
    let y = p.r4 * dsin(p.k1, t, n) + p.r3 * dsin(p.k2, t, n) + p.r5 * dcos(p.k3, t, n);
    let z = if n == 0 { p.rz } else { 0.0 };
    Vec3::new(x, y, z)
}

pub fn roulette(t: f64, p: &RouletteParams) -> ReferenceSample {
    ReferenceSample {
        position: roulette_derivative(p, t, 0),
        velocity: roulette_derivative(p, t, 1),
        acceleration: roulette_derivative(p, t, 2),
        jerk: roulette_derivative(p, t, 3),
        snap: roulette_derivative(p, t, 4),
        yaw: 0.0,
        yaw_rate: 0.0,
        yaw_accel: 0.0,
    }
}

/// Smooth acceleration step `amplitude * (tanh(k t - 2 pi) + 1)/2` along `direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhAccel {
    pub amplitude: f64,
    pub direction: Vec3,
    pub start: Vec3,
    pub yaw: f64,
}

fn ln_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Velocity of the unit profile, closed form.
fn tanh_velocity(t: f64) -> f64 {
    0.5 * t + (ln_cosh(TANH_RATE * t - TANH_OFFSET) - ln_cosh(TANH_OFFSET)) / (2.0 * TANH_RATE)
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Position of the unit profile by composite Gauss-Legendre quadrature of the velocity.
fn tanh_position(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let panels = (t / 0.1).ceil().max(1.0) as usize;
    let h = t / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * tanh_velocity(mid + 0.5 * h * x);
        }
    }
    sum * 0.5 * h
}

impl TanhAccel {
    pub fn sample(&self, t: f64) -> ReferenceSample {
        let d = self.direction.normalize() * self.amplitude;
        let (a, j, s) = tanh_accel_reference(t);
        ReferenceSample {
            position: self.start + d * tanh_position(t),
            velocity: d * tanh_velocity(t),
            acceleration: d * a,
            jerk: d * j,
            snap: d * s,
            yaw: self.yaw,
            yaw_rate: 0.0,
            yaw_accel: 0.0,
        }
    }
}

/// Reference given as samples of all flat outputs and derivatives,
/// linearly interpolated and held beyond the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    pub times: Vec<f64>,
    pub samples: Vec<ReferenceSample>,
}

impl SampledTrajectory {
    pub fn sample(&self, t: f64) -> ReferenceSample {
        let n = self.times.len();
        if n == 0 {
            return ReferenceSample::default();
        }
        let i = self.times.partition_point(|x| *x <= t);
        if i == 0 {
            return self.samples[0];
        }
        if i == n {
            return self.samples[n - 1];
        }
        let (a, b) = (&self.samples[i - 1], &self.samples[i]);
        let w = (t - self.times[i - 1]) / (self.times[i] - self.times[i - 1]);
        let lerp = |x: f64, y: f64| x + (y - x) * w;
        let lerp3 = |x: Vec3, y: Vec3| x + (y - x) * w;
        ReferenceSample {
            position: lerp3(a.position, b.position),
            velocity: lerp3(a.velocity, b.velocity),
            acceleration: lerp3(a.acceleration, b.acceleration),
            jerk: lerp3(a.jerk, b.jerk),
            snap: lerp3(a.snap, b.snap),
            yaw: lerp(a.yaw, b.yaw),
            yaw_rate: lerp(a.yaw_rate, b.yaw_rate),
            yaw_accel: lerp(a.yaw_accel, b.yaw_accel),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    Hover { position: Vec3, yaw: f64 },
    Roulette(RouletteParams),
    TanhAccel(TanhAccel),
    Sampled(SampledTrajectory),
}

impl Trajectory {
    pub fn sample(&self, t: f64) -> ReferenceSample {
        match self {
            Trajectory::Hover { position, yaw } => ReferenceSample::hover(*position, *yaw),
            Trajectory::Roulette(p) => roulette(t, p),
            Trajectory::TanhAccel(p) => p.sample(t),
            Trajectory::Sampled(s) => s.sample(t),
        }
    }
}
