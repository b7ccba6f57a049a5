use num_complex::Complex;

use crate::error::{Error, Result};
use crate::modem::{Trit, TritSequence};
use crate::physics::{
    envelope, intensity_from_coefficients, ArrayGeometry, BitPattern, FourierCoefficients,
    IntensityScale,
};
use crate::scalar::Real;

/// Smallest `|sin(2ks)|` the noiseless recovery divides by.
pub const MIN_SIGNAL_SCALE: f64 = 1e-6;

/// `q_m = 2 pi m / ((2N - 1) d)` for `m = -(N-1) ..= N-1`.
pub fn sampling_grid<T: Real>(n_cantilevers: usize, pitch: T) -> Vec<T> {
    assert!(n_cantilevers >= 1, "need at least one cantilever");
    oversampled_grid(n_cantilevers, pitch, 1)
}

/// Uniform grid over one period `2 pi / d` with `factor * (2N - 1)` points,
/// centred on `q = 0`. Every `factor`-th point is a point of
/// [`sampling_grid`].
pub fn oversampled_grid<T: Real>(n_cantilevers: usize, pitch: T, factor: usize) -> Vec<T> {
    let count = factor * (2 * n_cantilevers - 1);
    let span = T::from_count(count) * pitch;
    grid_indices(n_cantilevers, factor)
        .map(|j| T::TAU() * T::from_isize(j).unwrap() / span)
        .collect()
}

fn grid_indices(n_cantilevers: usize, factor: usize) -> std::ops::Range<isize> {
    let top = (factor * (n_cantilevers - 1) + (factor - 1) / 2) as isize;
    let count = (factor * (2 * n_cantilevers - 1)) as isize;
    -top..count - top
}

/// Intensity samples at the points of a sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledIntensity<T> {
    n_cantilevers: usize,
    samples: Vec<T>,
    normalized: bool,
}

impl<T: Real> SampledIntensity<T> {
    pub fn new(n_cantilevers: usize, samples: Vec<T>, normalized: bool) -> Result<Self> {
        let expected = 2 * n_cantilevers - 1;
        if samples.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: samples.len(),
            });
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite intensity sample".into(),
            ));
        }
        if !normalized && samples.iter().any(|&s| s < T::zero()) {
            return Err(Error::InvalidParameter("negative raw intensity".into()));
        }
        Ok(Self {
            n_cantilevers,
            samples,
            normalized,
        })
    }

    /// Samples the Fraunhofer intensity of `bits` on the grid.
    pub fn from_pattern(geom: &ArrayGeometry<T>, bits: &BitPattern, scale: IntensityScale) -> Self {
        let coeffs = crate::physics::structure_factor(bits, geom.two_ks());
        let samples = sampling_grid(bits.len(), geom.pitch())
            .into_iter()
            .map(|q| intensity_from_coefficients(geom, &coeffs, q, scale))
            .collect();
        Self {
            n_cantilevers: bits.len(),
            samples,
            normalized: scale == IntensityScale::Normalized,
        }
    }

    /// Normalized samples of the band-limited intensity with coefficients `coeffs`.
    pub fn synthesize(coeffs: &FourierCoefficients<T>) -> Self {
        let n = coeffs.n_cantilevers();
        let count = T::from_count(2 * n - 1);
        let samples = grid_indices(n, 1)
            .map(|m| {
                let phase = T::TAU() * T::from_isize(m).unwrap() / count;
                coeffs.band_sum(phase).re
            })
            .collect();
        Self {
            n_cantilevers: n,
            samples,
            normalized: true,
        }
    }

    pub fn n_cantilevers(&self) -> usize {
        self.n_cantilevers
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Divides out `|C(q_m)|^2`, computed from the geometry.
    pub fn normalize(self, geom: &ArrayGeometry<T>) -> Self {
        if self.normalized {
            return self;
        }
        let grid = sampling_grid(self.n_cantilevers, geom.pitch());
        let samples = self
            .samples
            .iter()
            .zip(grid)
            .map(|(&s, q)| s / envelope(geom, q))
            .collect();
        Self {
            samples,
            normalized: true,
            ..self
        }
    }
}

/// `f(n) = 1/(2N-1) sum_m I(q_m) exp(i n q_m d)`.
pub fn demodulate<T: Real>(samples: &SampledIntensity<T>) -> Result<FourierCoefficients<T>> {
    if !samples.normalized {
        return Err(Error::NotNormalized);
    }
    project(samples.n_cantilevers, 1, &samples.samples)
}

/// Ideal low-pass of normalized samples on an [`oversampled_grid`] to the
/// band `|n| <= N - 1`, decimated back onto the sampling grid.
pub fn lowpass_decimate<T: Real>(
    n_cantilevers: usize,
    factor: usize,
    oversampled: &[T],
) -> Result<SampledIntensity<T>> {
    let coeffs = project(n_cantilevers, factor, oversampled)?;
    Ok(SampledIntensity::synthesize(&coeffs))
}

fn project<T: Real>(n: usize, factor: usize, samples: &[T]) -> Result<FourierCoefficients<T>> {
    let count = factor * (2 * n - 1);
    if samples.len() != count {
        return Err(Error::LengthMismatch {
            expected: count,
            actual: samples.len(),
        });
    }
    let top = n as isize - 1;
    let countf = T::from_count(count);
    let twiddles: Vec<Complex<T>> = grid_indices(n, factor)
        .map(|j| Complex::from_polar(T::one(), T::TAU() * T::from_isize(j).unwrap() / countf))
        .collect();
    let coeffs = (-top..=top)
        .map(|k| {
            let sum: Complex<T> = samples
                .iter()
                .zip(&twiddles)
                .map(|(&s, w)| w.powi(k as i32) * s)
                .sum();
            sum / countf
        })
        .collect();
    FourierCoefficients::new(n, coeffs)
}

/// Trits recovered from noiseless coefficients together with the largest
/// distance of a pre-rounding value from its integer.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovered<T> {
    pub trits: TritSequence,
    pub soft: Vec<T>,
    pub max_deviation: T,
}

/// `t_n = (Im f(n+1) - Im f(n)) / sin(2ks)`, rounded to the nearest trit
/// with ties going to zero.
pub fn recover_trits_noiseless<T: Real>(
    coeffs: &FourierCoefficients<T>,
    two_ks: T,
) -> Result<Recovered<T>> {
    let n = coeffs.n_cantilevers();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    let scale = two_ks.sin();
    if scale.abs() < T::lit(MIN_SIGNAL_SCALE) {
        return Err(Error::DegenerateDepth(scale.as_f64()));
    }
    let soft: Vec<T> = (0..n / 2)
        .map(|i| {
            let i = i as isize;
            (coeffs.get(i + 1).im - coeffs.get(i).im) / scale
        })
        .collect();
    let mut max_deviation = T::zero();
    let trits = soft
        .iter()
        .map(|&y| {
            let r = round_ties_to_zero(y);
            max_deviation = max_deviation.max((y - r).abs());
            let clamped = r.max(-T::one()).min(T::one());
            Trit::from_value(clamped.to_i32().unwrap()).unwrap()
        })
        .collect();
    Ok(Recovered {
        trits: TritSequence::new(trits),
        soft,
        max_deviation,
    })
}

fn round_ties_to_zero<T: Real>(y: T) -> T {
    let floor = y.floor();
    let frac = y - floor;
    let half = T::lit(0.5);
    if frac > half {
        floor + T::one()
    } else if frac < half {
        floor
    } else if floor < T::zero() {
        floor + T::one()
    } else {
        floor
    }
}
