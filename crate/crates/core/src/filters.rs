//! Second-order Butterworth low-pass filters and the filtered measurement bank.

use nalgebra::SVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::SensorSample;
use crate::{i_z, Vec3, Vec4, VehicleParams};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FilterError {
    #[error("cutoff {cutoff} rad/s must lie in (0, pi * fs) for fs = {sample_rate} Hz")]
    BadCutoff { cutoff: f64, sample_rate: f64 },
}

/// Discrete biquad `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    pub fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    /// Frequency response at `omega` rad/s for sample rate `fs` Hz.
    pub fn response(&self, omega: f64, fs: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -omega / fs);
        let z2 = z1 * z1;
        (self.b0 + self.b1 * z1 + self.b2 * z2) / (1.0 + self.a1 * z1 + self.a2 * z2)
    }

    pub fn poles(&self) -> [Complex64; 2] {
        let disc = Complex64::new(self.a1 * self.a1 - 4.0 * self.a2, 0.0).sqrt();
        [(-self.a1 + disc) / 2.0, (-self.a1 - disc) / 2.0]
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }
}

/// Bilinear transform of `1/((s/wc)^2 + sqrt(2) s/wc + 1)` prewarped at `wc`.
pub fn butter2_design(cutoff: f64, sample_rate: f64) -> Result<Biquad, FilterError> {
    let nyquist = std::f64::consts::PI * sample_rate;
    if !(cutoff > 0.0 && sample_rate > 0.0 && cutoff < nyquist && cutoff.is_finite()) {
        return Err(FilterError::BadCutoff { cutoff, sample_rate });
    }
    let k = (cutoff / (2.0 * sample_rate)).tan();
    let k2 = k * k;
    let r2 = std::f64::consts::SQRT_2;
    let d = 1.0 + r2 * k + k2;
    let b0 = k2 / d;
    Ok(Biquad { b0, b1: 2.0 * b0, b2: b0, a1: 2.0 * (k2 - 1.0) / d, a2: (1.0 - r2 * k + k2) / d })
}

/// `N` independent channels sharing one coefficient set (transposed direct form II).
#[derive(Debug, Clone, PartialEq)]
pub struct LowPass<const N: usize> {
    coeffs: Biquad,
    s1: SVector<f64, N>,
    s2: SVector<f64, N>,
    primed: bool,
}

impl<const N: usize> LowPass<N> {
    pub fn new(coeffs: Biquad) -> Self {
        Self { coeffs, s1: SVector::zeros(), s2: SVector::zeros(), primed: false }
    }

    pub fn coefficients(&self) -> &Biquad {
        &self.coeffs
    }

    /// Sets the delay states so that a constant input `x` is passed unchanged.
    pub fn reset_to(&mut self, x: &SVector<f64, N>) {
        let c = &self.coeffs;
        let y = x * c.dc_gain();
        self.s2 = x * c.b2 - y * c.a2;
        self.s1 = x * (c.b1 + c.b2) - y * (c.a1 + c.a2);
        self.primed = true;
    }

    /// Filters one sample; the first call warm-starts at `x`.
    pub fn update(&mut self, x: &SVector<f64, N>) -> SVector<f64, N> {
        if !self.primed {
            self.reset_to(x);
        }
        let c = self.coeffs;
        let y = x * c.b0 + self.s1;
        self.s1 = x * c.b1 - y * c.a1 + self.s2;
        self.s2 = x * c.b2 - y * c.a2;
        y
    }
}

/// Filtered signals consumed by the INDI loops. All share one filter design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilteredSignals {
    /// inertial acceleration, m/s^2
    pub accel: Vec3,
    /// rad/s
    pub rate: Vec3,
    /// rad/s^2
    pub rate_deriv: Vec3,
    /// rad/s
    pub motor_speeds: Vec4,
    /// filtered `tau b_z` (inertial), m/s^2
    pub thrust_vector: Vec3,
    /// N m
    pub moment: Vec3,
    /// filtered collective thrust, N
    pub thrust: f64,
    /// filtered specific thrust, m/s^2
    pub specific_thrust: f64,
    /// m/s^3
    pub specific_thrust_rate: f64,
}

impl FilteredSignals {
    /// Implied external force `m (a_f - (tau b_z)_f - g i_z)`.
    pub fn external_force(&self, params: &VehicleParams) -> Vec3 {
        params.mass * (self.accel - self.thrust_vector - params.gravity * i_z())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    dt: f64,
    accel: LowPass<3>,
    thrust_vector: LowPass<3>,
    rate: LowPass<3>,
    rate_deriv: LowPass<3>,
    motor: LowPass<4>,
    motor_sq: LowPass<4>,
    motor_accel: LowPass<4>,
    prev_rate: Option<Vec3>,
    prev_motor: Option<Vec4>,
    prev_specific_thrust: Option<f64>,
}

impl FilterBank {
    pub fn new(cutoff: f64, sample_rate: f64) -> Result<Self, FilterError> {
        let c = butter2_design(cutoff, sample_rate)?;
        Ok(Self {
            dt: 1.0 / sample_rate,
            accel: LowPass::new(c),
            thrust_vector: LowPass::new(c),
            rate: LowPass::new(c),
            rate_deriv: LowPass::new(c),
            motor: LowPass::new(c),
            motor_sq: LowPass::new(c),
            motor_accel: LowPass::new(c),
            prev_rate: None,
            prev_motor: None,
            prev_specific_thrust: None,
        })
    }

    pub fn coefficients(&self) -> &Biquad {
        self.accel.coefficients()
    }

    /// Processes one control-rate sample.
    pub fn update(&mut self, sample: &SensorSample, params: &VehicleParams) -> FilteredSignals {
        let bz = sample.attitude.rotate(&Vec3::z());
        let a = sample.attitude.rotate(&sample.accel_body) + params.gravity * i_z();
        let w = sample.motor_speeds;
        let tau = -(params.k_tau / params.mass) * w.norm_squared();

        let rate_diff = match self.prev_rate {
            Some(p) => (sample.gyro - p) / self.dt,
            None => Vec3::zeros(),
        };
        let motor_diff = match self.prev_motor {
            Some(p) => (w - p) / self.dt,
            None => Vec4::zeros(),
        };
        self.prev_rate = Some(sample.gyro);
        self.prev_motor = Some(w);

        let accel = self.accel.update(&a);
        let thrust_vector = self.thrust_vector.update(&(bz * tau));
        let rate = self.rate.update(&sample.gyro);
        let rate_deriv = self.rate_deriv.update(&rate_diff);
        let motor_speeds = self.motor.update(&w);
        let w_sq = self.motor_sq.update(&w.component_mul(&w));
        let w_dot = self.motor_accel.update(&motor_diff);

        let out = params.g1() * w_sq + params.g2() * w_dot;
        let thrust = out[3];
        let specific_thrust = thrust / params.mass;
        let specific_thrust_rate = match self.prev_specific_thrust {
            Some(p) => (specific_thrust - p) / self.dt,
            None => 0.0,
        };
        self.prev_specific_thrust = Some(specific_thrust);

        FilteredSignals {
            accel,
            rate,
            rate_deriv,
            motor_speeds,
            thrust_vector,
            moment: Vec3::new(out[0], out[1], out[2]),
            thrust,
            specific_thrust,
            specific_thrust_rate,
        }
    }
}
