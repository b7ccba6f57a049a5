//! Optical diffraction read channel for thermo-mechanical probe storage.
//!
//! A linear array of reflective cantilevers resting on an indented medium acts
//! as an irregular grating. User bits are written as balanced-ternary central
//! trits, read back from the Fourier coefficients of the diffraction
//! intensity, and detected either symbol by symbol or with a trellis
//! maximum-likelihood detector.
//!
//! The numerical layers ([`physics`], [`modem`], [`channel`], [`detect`]) are
//! generic over the [`Real`] scalar; the aliases below fix them to `f64`,
//! which is what the experiment [`harness`] uses.

// `!(x > 0)` is used on purpose so NaN falls into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod detect;
mod error;
pub mod harness;
pub mod modem;
pub mod physics;
mod scalar;
pub mod seeds;

pub use error::{Error, Result};
pub use scalar::{sinc, Real};

pub type Geometry = physics::ArrayGeometry<f64>;
pub type Coefficients = physics::FourierCoefficients<f64>;
pub type Samples = modem::SampledIntensity<f64>;
pub type Received = channel::ReceivedVector<f64>;
pub type Frame = channel::ArrayReadFrame<f64>;
pub type Noise = channel::NoiseParams<f64>;
pub type Jitter = channel::JitterParams<f64>;
pub type Detector = detect::SequenceDetector<f64>;
pub type Estimate = detect::ScaleEstimate<f64>;

pub type GeometryF32 = physics::ArrayGeometry<f32>;
pub type CoefficientsF32 = physics::FourierCoefficients<f32>;
