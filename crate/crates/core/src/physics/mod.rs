//! Diffraction of light by the cantilever array: far-field closed forms and
//! the Kirchhoff quadrature reference.

mod fraunhofer;
mod geometry;
mod kirchhoff;
pub mod quadrature;

pub use fraunhofer::{
    closed_form_field, envelope, fraunhofer_intensity, fresnel_number, intensity_from_coefficients,
    structure_factor, FourierCoefficients, IntensityScale,
};
pub use geometry::{ArrayGeometry, BitPattern, ObservationPoint, NON_RESONANCE_FLOOR};
pub use kirchhoff::{kirchhoff_field, KirchhoffSolver, StripFieldTable, DEFAULT_TOLERANCE};

/// Smallest accepted `k a` (strip half-width in wavelengths times `2 pi`).
pub const MIN_HALF_WIDTH_PHASE: f64 = 10.0;
/// Smallest accepted `k |r - r0|` for the asymptotic Green's function.
pub const MIN_PATH_PHASE: f64 = 1e3;
