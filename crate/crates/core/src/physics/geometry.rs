use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::physics::envelope;
use crate::scalar::Real;

/// Relative floor for `|C(q_m)|^2` over the sampling grid; below it the
/// envelope cannot be divided out reliably.
pub const NON_RESONANCE_FLOOR: f64 = 1e-3;

/// Linear cantilever array and the illumination/observation set-up.
///
/// Lengths are in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry<T> {
    n_cantilevers: usize,
    pitch: T,
    width: T,
    wavelength: T,
    depth: T,
    sensor_distance: T,
}

impl<T: Real> ArrayGeometry<T> {
    pub fn new(
        n_cantilevers: usize,
        pitch: T,
        width: T,
        wavelength: T,
        depth: T,
        sensor_distance: T,
    ) -> Result<Self> {
        let finite = [pitch, width, wavelength, depth, sensor_distance]
            .iter()
            .all(|v| v.is_finite());
        if n_cantilevers == 0 {
            return Err(Error::InvalidGeometry(
                "need at least one cantilever".into(),
            ));
        }
        if !finite {
            return Err(Error::InvalidGeometry("non-finite parameter".into()));
        }
        if !(width > T::zero() && pitch > width) {
            return Err(Error::InvalidGeometry(format!(
                "require pitch > width > 0 (pitch {pitch}, width {width})"
            )));
        }
        if wavelength <= T::zero() {
            return Err(Error::InvalidGeometry("wavelength must be positive".into()));
        }
        if depth < T::zero() {
            return Err(Error::InvalidGeometry(
                "indentation depth must be >= 0".into(),
            ));
        }
        if sensor_distance <= T::zero() {
            return Err(Error::InvalidGeometry(
                "sensor distance must be positive".into(),
            ));
        }
        let geom = Self {
            n_cantilevers,
            pitch,
            width,
            wavelength,
            depth,
            sensor_distance,
        };
        geom.check_non_resonance()?;
        Ok(geom)
    }

    /// Five undeflected-capable cantilevers, 13.9 µm wide on a 20 µm pitch,
    /// lit at 635 nm, optimal depth, observed 1 m away.
    pub fn bench_setup() -> Self {
        let wavelength = T::lit(635e-9);
        Self::new(
            5,
            T::lit(20e-6),
            T::lit(13.9e-6),
            wavelength,
            wavelength / T::lit(8.0),
            T::one(),
        )
        .expect("bench geometry is valid")
    }

    fn check_non_resonance(&self) -> Result<()> {
        let n = self.n_cantilevers as isize;
        let values: Vec<(isize, T)> = (-(n - 1)..n)
            .map(|m| (m, envelope(self, self.sampling_point(m))))
            .collect();
        let max = values.iter().fold(T::zero(), |acc, &(_, v)| acc.max(v));
        for (m, v) in values {
            let ratio = v / max;
            if !(ratio >= T::lit(NON_RESONANCE_FLOOR)) {
                return Err(Error::ResonantGeometry {
                    index: m,
                    ratio: ratio.as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn n_cantilevers(&self) -> usize {
        self.n_cantilevers
    }

    pub fn pitch(&self) -> T {
        self.pitch
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn half_width(&self) -> T {
        self.width / T::lit(2.0)
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn wavenumber(&self) -> T {
        T::TAU() / self.wavelength
    }

    pub fn depth(&self) -> T {
        self.depth
    }

    pub fn sensor_distance(&self) -> T {
        self.sensor_distance
    }

    /// Round-trip phase `2ks` picked up by a deflected cantilever.
    pub fn two_ks(&self) -> T {
        T::lit(2.0) * self.wavenumber() * self.depth
    }

    /// `sin(2ks)`: the gain relating central-trit sums to `Im f(n)`.
    pub fn signal_scale(&self) -> T {
        self.two_ks().sin()
    }

    /// Distance from the array axis to the outer edge of the last cantilever.
    pub fn half_extent(&self) -> T {
        T::from_count(self.n_cantilevers - 1) * self.pitch / T::lit(2.0) + self.half_width()
    }

    /// Transverse position of the centre of cantilever `n`.
    pub fn cantilever_center(&self, n: usize) -> T {
        T::from_count(n) * self.pitch
            - T::from_count(self.n_cantilevers - 1) * self.pitch / T::lit(2.0)
    }

    /// Sampling point `q_m = 2 pi m / ((2N - 1) d)`.
    pub fn sampling_point(&self, m: isize) -> T {
        let span = T::from_count(2 * self.n_cantilevers - 1) * self.pitch;
        T::TAU() * T::from_isize(m).expect("index representable") / span
    }

    pub fn with_depth(&self, depth: T) -> Result<Self> {
        Self::new(
            self.n_cantilevers,
            self.pitch,
            self.width,
            self.wavelength,
            depth,
            self.sensor_distance,
        )
    }

    pub fn with_sensor_distance(&self, distance: T) -> Result<Self> {
        Self::new(
            self.n_cantilevers,
            self.pitch,
            self.width,
            self.wavelength,
            self.depth,
            distance,
        )
    }

    pub fn with_cantilevers(&self, n: usize) -> Result<Self> {
        Self::new(
            n,
            self.pitch,
            self.width,
            self.wavelength,
            self.depth,
            self.sensor_distance,
        )
    }

    /// Moves the sensor so that the Fresnel number equals `fresnel`.
    pub fn with_fresnel_number(&self, fresnel: T) -> Result<Self> {
        if !(fresnel > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "Fresnel number must be positive, got {fresnel}"
            )));
        }
        let extent = self.half_extent();
        self.with_sensor_distance(self.wavenumber() * extent * extent / fresnel)
    }
}

/// Binary indentation string `b_0 .. b_{N-1}`; `true` marks an indentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitPattern(Vec<bool>);

impl BitPattern {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter("empty bit pattern".into()));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "empty bit pattern");
        Self(vec![false; n])
    }

    /// Builds a pattern from 0/1 digits.
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let bits = digits
            .iter()
            .map(|&d| match d {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidParameter(format!("bit value {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    /// Pattern whose bits are the binary digits of `value`, `b_0` least significant.
    pub fn from_index(value: u64, n: usize) -> Self {
        assert!(n > 0 && n <= 64);
        Self((0..n).map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    #[inline]
    pub fn digit(&self, i: usize) -> i32 {
        i32::from(self.0[i])
    }

    /// The intensity-preserving map `b_n -> 1 - b_{N-1-n}`.
    pub fn mirror_complement(&self) -> Self {
        Self(self.0.iter().rev().map(|b| !b).collect())
    }
}

impl fmt::Display for BitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidParameter(format!("bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_digits(&digits)
    }
}

/// Observation point `(H, 0)` in the sensor plane, the array sitting at depth `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationPoint<T> {
    pub h: T,
    pub v: T,
}

impl<T: Real> ObservationPoint<T> {
    pub fn new(h: T, v: T) -> Self {
        Self { h, v }
    }

    /// Point seen under angle `theta` from the array centre.
    pub fn at_angle(theta: T, v: T) -> Self {
        Self {
            h: v * theta.tan(),
            v,
        }
    }

    /// Point at angle parameter `q = k theta`.
    pub fn at_q(q: T, k: T, v: T) -> Self {
        Self::at_angle(q / k, v)
    }

    pub fn distance(&self) -> T {
        self.h.hypot(self.v)
    }

    pub fn theta(&self) -> T {
        self.h.atan2(self.v)
    }

    pub fn q(&self, k: T) -> T {
        k * self.theta()
    }
}
