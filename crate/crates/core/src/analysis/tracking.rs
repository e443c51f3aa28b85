//! Smooth acceleration step and the linear tracking response to it.

use std::f64::consts::PI;

use super::linear_loop::{build_linear_loop, LinearModel, LoopOptions};
use super::tf::{rms_difference, TfError, TimeSeries};

/// Rate of the tanh argument, 1/s.
pub const TANH_RATE: f64 = 4.0 * PI / 3.0;
/// Offset of the tanh argument.
pub const TANH_OFFSET: f64 = 2.0 * PI;

/// `a = tanh(k t - 2 pi)/2 + 1/2` with its first and second derivatives.
pub fn tanh_accel_reference(t: f64) -> (f64, f64, f64) {
    let u = TANH_RATE * t - TANH_OFFSET;
    let th = u.tanh();
    let sech2 = 1.0 - th * th;
    let a = 0.5 * th + 0.5;
    let j = 0.5 * TANH_RATE * sech2;
    let s = -TANH_RATE * TANH_RATE * sech2 * th;
    (a, j, s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingResponse {
    pub reference: TimeSeries,
    pub response: TimeSeries,
}

impl TrackingResponse {
    pub fn rms_error(&self) -> f64 {
        rms_difference(&self.reference.y, &self.response.y)
    }
}

/// Linear acceleration response to the tanh reference with the position loop open.
pub fn tracking_response(model: &LinearModel, opts: &LoopOptions, duration: f64, dt: f64) -> Result<TrackingResponse, TfError> {
    let tf = build_linear_loop(model, opts).accel_per_ref;
    tf.check_stable()?;
    let response = tf.simulate(|t| tanh_accel_reference(t).0, duration, dt)?;
    let reference = TimeSeries { t: response.t.clone(), y: response.t.iter().map(|t| tanh_accel_reference(*t).0).collect() };
    Ok(TrackingResponse { reference, response })
}
