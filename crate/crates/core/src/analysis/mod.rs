//! Linearized response analysis of the pitch/x-axis cascade.

pub mod linear_loop;
pub mod poly;
pub mod tf;
pub mod tracking;

pub use linear_loop::{build_linear_loop, LinearModel, LoopOptions, LoopTransferFunctions};
pub use poly::Polynomial;
pub use tf::{RationalTf, TfError, TimeSeries};
pub use tracking::{tanh_accel_reference, tracking_response, TrackingResponse};
