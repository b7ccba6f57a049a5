//! Far-field (Fraunhofer) description of the cantilever grating.
//!
//! With the data-independent envelope `|C(q)|^2` divided out, the intensity is
//! a trigonometric polynomial in `qd` whose coefficients `f(n)` depend on the
//! recorded bits only through the trits `b_{n+p} - b_p`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::physics::{ArrayGeometry, BitPattern, MIN_HALF_WIDTH_PHASE, MIN_PATH_PHASE};
use crate::scalar::{sinc, Real};

/// Coefficients `f(n)`, `n = -(N-1) ..= N-1`, of the normalized intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients<T> {
    n_cantilevers: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> FourierCoefficients<T> {
    /// `coeffs` are ordered from `n = -(N-1)` up to `n = N-1`.
    pub fn new(n_cantilevers: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let expected = 2 * n_cantilevers.max(1) - 1;
        if n_cantilevers == 0 || coeffs.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: coeffs.len(),
            });
        }
        Ok(Self {
            n_cantilevers,
            coeffs,
        })
    }

    pub fn n_cantilevers(&self) -> usize {
        self.n_cantilevers
    }

    /// Largest index `N - 1`.
    pub fn max_index(&self) -> isize {
        self.n_cantilevers as isize - 1
    }

    #[inline]
    pub fn get(&self, n: isize) -> Complex<T> {
        self.coeffs[(n + self.max_index()) as usize]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `(n, f(n))` pairs in ascending `n`.
    pub fn iter(&self) -> impl Iterator<Item = (isize, Complex<T>)> + '_ {
        let top = self.max_index();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as isize - top, c))
    }

    /// `max_n |f(-n) - conj f(n)|` relative to `|f(0)|`.
    pub fn hermitian_defect(&self) -> T {
        let scale = self.get(0).norm().max(T::min_positive_value());
        (1..=self.max_index())
            .map(|n| (self.get(-n) - self.get(n).conj()).norm() / scale)
            .fold(T::zero(), T::max)
    }

    /// Evaluates `sum_n f(n) e^{-i n phase}` where `phase = q d`.
    pub fn band_sum(&self, phase: T) -> Complex<T> {
        self.iter()
            .map(|(n, c)| c * Complex::from_polar(T::one(), -T::from_isize(n).unwrap() * phase))
            .sum()
    }
}

/// `f(n) = sum_p exp(i * two_ks * (b_{n+p} - b_p))` for every `|n| < N`.
///
/// Each term only depends on whether the trit is -1, 0 or +1, so the sum is
/// assembled from integer counts and `f(0) = N` holds exactly.
pub fn structure_factor<T: Real>(bits: &BitPattern, two_ks: T) -> FourierCoefficients<T> {
    let n_bits = bits.len();
    let plus = Complex::from_polar(T::one(), two_ks);
    let minus = plus.conj();
    let mut positive = Vec::with_capacity(n_bits);
    for n in 0..n_bits {
        let (mut up, mut down, mut flat) = (0usize, 0usize, 0usize);
        for p in 0..n_bits - n {
            match bits.digit(n + p) - bits.digit(p) {
                1 => up += 1,
                -1 => down += 1,
                _ => flat += 1,
            }
        }
        let value = if up == 0 && down == 0 {
            Complex::new(T::from_count(flat), T::zero())
        } else {
            Complex::new(T::from_count(flat), T::zero())
                + plus * T::from_count(up)
                + minus * T::from_count(down)
        };
        positive.push(value);
    }
    let coeffs = positive
        .iter()
        .skip(1)
        .rev()
        .map(|c| c.conj())
        .chain(positive.iter().copied())
        .collect();
    FourierCoefficients {
        n_cantilevers: n_bits,
        coeffs,
    }
}

/// Whether the data-independent envelope `|C(q)|^2` multiplies the intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntensityScale {
    /// `|C(q)|^2 := 1`; the signal chain works in this mode.
    #[default]
    Normalized,
    Absolute,
}

/// `|C(q)|^2 = (k w^2 / (2 pi R)) sinc^2(q w / 2)` with `R = V / cos(q / k)`.
pub fn envelope<T: Real>(geom: &ArrayGeometry<T>, q: T) -> T {
    let k = geom.wavenumber();
    let w = geom.width();
    let r = geom.sensor_distance() / (q / k).cos();
    let s = sinc(q * w / T::lit(2.0));
    k * w * w / (T::TAU() * r) * s * s
}

/// Intensity of the reflected light at angle parameter `q`.
pub fn fraunhofer_intensity<T: Real>(
    geom: &ArrayGeometry<T>,
    bits: &BitPattern,
    q: T,
    scale: IntensityScale,
) -> T {
    let coeffs = structure_factor(bits, geom.two_ks());
    intensity_from_coefficients(geom, &coeffs, q, scale)
}

/// Same as [`fraunhofer_intensity`] for precomputed coefficients.
pub fn intensity_from_coefficients<T: Real>(
    geom: &ArrayGeometry<T>,
    coeffs: &FourierCoefficients<T>,
    q: T,
    scale: IntensityScale,
) -> T {
    let band = coeffs.band_sum(q * geom.pitch());
    debug_assert!(
        band.im.abs() <= T::lit(1e-10) * band.re.abs().max(T::one()),
        "intensity not real: {band}"
    );
    let value = band.re.max(T::zero());
    match scale {
        IntensityScale::Normalized => value,
        IntensityScale::Absolute => value * envelope(geom, q),
    }
}

pub(crate) fn check_far_field<T: Real>(geom: &ArrayGeometry<T>, min_distance: T) -> Result<()> {
    let ka = geom.wavenumber() * geom.half_width();
    if ka < T::lit(MIN_HALF_WIDTH_PHASE) {
        return Err(Error::FarFieldViolation(format!(
            "k*a = {ka} below {MIN_HALF_WIDTH_PHASE}"
        )));
    }
    let kd = geom.wavenumber() * min_distance;
    if kd < T::lit(MIN_PATH_PHASE) {
        return Err(Error::FarFieldViolation(format!(
            "k*|r - r0| = {kd} below {MIN_PATH_PHASE}"
        )));
    }
    Ok(())
}

/// Analytic far-field amplitude at diffraction angle `theta`, including the
/// `(1 + cos theta)` obliquity factor and the data-independent phase.
pub fn closed_form_field<T: Real>(
    geom: &ArrayGeometry<T>,
    bits: &BitPattern,
    theta: T,
) -> Result<Complex<T>> {
    if bits.len() != geom.n_cantilevers() {
        return Err(Error::LengthMismatch {
            expected: geom.n_cantilevers(),
            actual: bits.len(),
        });
    }
    if !(theta.abs() < T::FRAC_PI_2()) {
        return Err(Error::InvalidParameter(format!(
            "angle {theta} outside (-pi/2, pi/2)"
        )));
    }
    let k = geom.wavenumber();
    let a = geom.half_width();
    let v = geom.sensor_distance();
    let r = v / theta.cos();
    check_far_field(geom, v)?;

    let (sin_t, cos_t) = theta.sin_cos();
    let obliquity = T::one() + cos_t;
    let amplitude = (k * a * a / (T::TAU() * r)).sqrt() * obliquity * sinc(k * a * sin_t);
    let n_minus_one = T::from_count(bits.len() - 1);
    let mu = k * (v + r + n_minus_one * geom.pitch() * sin_t / T::lit(2.0)) - T::FRAC_PI_4();
    let step = k * geom.pitch() * sin_t;
    let deflection = k * geom.depth() * obliquity;
    let sum: Complex<T> = bits
        .bits()
        .iter()
        .enumerate()
        .map(|(n, &b)| {
            let phase = if b { deflection } else { T::zero() } - T::from_count(n) * step;
            Complex::from_polar(T::one(), phase)
        })
        .sum();
    Ok(Complex::from_polar(amplitude, mu) * sum)
}

/// `F = k ((N-1) d / 2 + w / 2)^2 / V`.
pub fn fresnel_number<T: Real>(geom: &ArrayGeometry<T>) -> T {
    let extent = geom.half_extent();
    geom.wavenumber() * extent * extent / geom.sensor_distance()
}
