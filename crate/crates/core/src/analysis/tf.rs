//! Rational transfer functions and their time-domain simulation.

use num_complex::Complex64;
use thiserror::Error;

use super::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TfError {
    #[error("transfer function is improper")]
    Improper,
    #[error("transfer function has a pole at {0} with non-negative real part")]
    Unstable(Complex64),
    #[error("time step and duration must be positive")]
    BadGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalTf {
    pub num: Polynomial,
    pub den: Polynomial,
}

/// Sampled signal.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

impl TimeSeries {
    pub fn last(&self) -> f64 {
        self.y.last().copied().unwrap_or(f64::NAN)
    }

    /// Value at the first sample with time `>= t`.
    pub fn at(&self, t: f64) -> f64 {
        let i = self.t.partition_point(|x| *x < t - 1e-12);
        self.y[i.min(self.y.len() - 1)]
    }
}

impl RationalTf {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self { num, den }
    }

    pub fn gain(k: f64) -> Self {
        Self::new(Polynomial::constant(k), Polynomial::constant(1.0))
    }

    pub fn is_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() <= self.den.degree()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn freq_response(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    pub fn dc_gain(&self) -> f64 {
        self.num.eval_real(0.0) / self.den.eval_real(0.0)
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.den.roots()
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        self.num.roots()
    }

    pub fn check_stable(&self) -> Result<(), TfError> {
        match self.poles().into_iter().find(|p| p.re >= 0.0) {
            Some(p) => Err(TfError::Unstable(p)),
            None => Ok(()),
        }
    }

    /// Scaled so the denominator's leading coefficient is one.
    pub fn normalized(&self) -> Self {
        let k = 1.0 / self.den.leading();
        Self { num: self.num.scale(k), den: self.den.scale(k) }
    }

    /// Cancels common factors found by a tolerant Euclidean GCD.
    pub fn minreal(&self, tol: f64) -> Self {
        if self.num.is_zero() {
            return Self::new(Polynomial::zero(), Polynomial::constant(1.0));
        }
        let g = self.num.gcd(&self.den, tol);
        let (n, _) = self.num.div_rem(&g);
        let (d, _) = self.den.div_rem(&g);
        Self::new(n, d).normalized()
    }

    /// Slowest time constant `1/min|Re p|`.
    pub fn slowest_time_constant(&self) -> f64 {
        self.poles().iter().map(|p| 1.0 / p.re.abs()).fold(0.0, f64::max)
    }

    /// Unit-step response.
    pub fn step_response(&self, duration: f64, dt: f64) -> Result<TimeSeries, TfError> {
        self.check_stable()?;
        self.simulate(|_| 1.0, duration, dt)
    }

    /// Response from rest to `input(t)` using a controllable canonical
    /// realization integrated with RK4.
    pub fn simulate<F: Fn(f64) -> f64>(&self, input: F, duration: f64, dt: f64) -> Result<TimeSeries, TfError> {
        if !(dt > 0.0 && duration > 0.0) {
            return Err(TfError::BadGrid);
        }
        if !self.is_proper() {
            return Err(TfError::Improper);
        }
        let tf = self.normalized();
        let n = tf.den.degree();
        let direct = tf.num.coeff(n);
        let rest = &tf.num - &tf.den.scale(direct);
        let a: Vec<f64> = (0..n).map(|i| tf.den.coeff(i)).collect();
        let c: Vec<f64> = (0..n).map(|i| rest.coeff(i)).collect();

        let deriv = |x: &[f64], u: f64, out: &mut [f64]| {
            for i in 0..n.saturating_sub(1) {
                out[i] = x[i + 1];
            }
            if n > 0 {
                out[n - 1] = u - a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>();
            }
        };
        let output = |x: &[f64], u: f64| c.iter().zip(x).map(|(ci, xi)| ci * xi).sum::<f64>() + direct * u;

        let steps = (duration / dt).round() as usize;
        let mut series = TimeSeries { t: Vec::with_capacity(steps + 1), y: Vec::with_capacity(steps + 1) };
        let mut x = vec![0.0; n];
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for k in 0..=steps {
            let t = k as f64 * dt;
            series.t.push(t);
            series.y.push(output(&x, input(t)));
            if k == steps {
                break;
            }
            let (u0, uh, u1) = (input(t), input(t + 0.5 * dt), input(t + dt));
            deriv(&x, u0, &mut k1);
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * dt * k1[i];
            }
            deriv(&tmp, uh, &mut k2);
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * dt * k2[i];
            }
            deriv(&tmp, uh, &mut k3);
            for i in 0..n {
                tmp[i] = x[i] + dt * k3[i];
            }
            deriv(&tmp, u1, &mut k4);
            for i in 0..n {
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        Ok(series)
    }
}

/// Root-mean-square of the pointwise difference of two equally sampled series.
pub fn rms_difference(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return 0.0;
    }
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / n as f64).sqrt()
}
