//! Trit detectors working on the received imaginary parts.

mod scale;
mod threshold;
mod trellis;

pub use scale::{estimate_scale, scale_from_moment, ScaleEstimate};
pub use threshold::{slice, threshold_detect, threshold_detect_into};
pub use trellis::{ml_sequence_detect, path_metric, SequenceDetector, TrellisColumn};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_DETECTOR_SCALE: f64 = 1e-6;

pub(crate) fn check_scale<T: Real>(scale: T) -> Result<()> {
    if !(scale >= T::lit(MIN_DETECTOR_SCALE)) {
        return Err(Error::DegenerateScale(scale.as_f64()));
    }
    Ok(())
}
