//! Fourier-domain channel: additive white Gaussian noise on `Im f(n)` and a
//! global positioning error that shrinks the effective indentation depth of
//! a whole array read.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::modem::TritSequence;
use crate::physics::ArrayGeometry;
use crate::scalar::Real;
use crate::seeds::rng_for;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams<T> {
    pub sigma: T,
    pub seed: u64,
}

impl<T: Real> NoiseParams<T> {
    pub fn new(sigma: T, seed: u64) -> Result<Self> {
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("noise sigma {sigma}")));
        }
        Ok(Self { sigma, seed })
    }

    pub fn rng(&self) -> ChaCha8Rng {
        rng_for(&[self.seed])
    }
}

/// Global positioning error model. `sigma_j` and `pulse_width` share a unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterParams<T> {
    pub sigma_j: T,
    pub pulse_width: T,
}

impl<T: Real> JitterParams<T> {
    pub fn new(sigma_j: T, pulse_width: T) -> Result<Self> {
        if !(sigma_j >= T::zero()) || !(pulse_width > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "jitter sigma {sigma_j}, pulse width {pulse_width}"
            )));
        }
        Ok(Self {
            sigma_j,
            pulse_width,
        })
    }

    pub fn none(pulse_width: T) -> Self {
        Self {
            sigma_j: T::zero(),
            pulse_width,
        }
    }
}

/// Noisy observations `R_1 .. R_L` of `Im f(n)`; `R_0 = 0` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedVector<T>(Vec<T>);

impl<T: Real> ReceivedVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite received value".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `r_n = R_{n+1} - R_n` for `n = 0 .. L-1`.
    pub fn increments(&self) -> impl Iterator<Item = T> + '_ {
        std::iter::once(T::zero())
            .chain(self.0.iter().copied())
            .zip(self.0.iter().copied())
            .map(|(prev, next)| next - prev)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self(self.0.iter().map(|&v| v * factor).collect())
    }
}

/// `R_n = sin(two_ks_eff) * sum_{p<n} t_p + sigma W_n`.
pub fn transmit<T, R>(
    trits: &TritSequence,
    two_ks_eff: T,
    noise: &NoiseParams<T>,
    rng: &mut R,
) -> ReceivedVector<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let mut out = Vec::with_capacity(trits.len());
    transmit_into(trits, two_ks_eff.sin(), noise.sigma, rng, &mut out);
    ReceivedVector(out)
}

/// Allocation-free core of [`transmit`], taking the gain `sin(2ks)` directly.
pub fn transmit_into<T, R>(trits: &TritSequence, gain: T, sigma: T, rng: &mut R, out: &mut Vec<T>)
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    out.clear();
    let mut sum = 0i32;
    for t in trits.as_slice() {
        sum += t.value();
        let w: T = StandardNormal.sample(rng);
        out.push(gain * T::from_i32(sum).unwrap() + sigma * w);
    }
}

/// `10 log10(sin^2(2ks) / (3 sigma^2))`.
pub fn snr_db<T: Real>(depth_m: T, k: T, sigma: T) -> Result<T> {
    if sigma == T::zero() {
        return Err(Error::ZeroNoise);
    }
    let gain = (T::lit(2.0) * k * depth_m).sin();
    Ok(T::lit(10.0) * (gain * gain / (T::lit(3.0) * sigma * sigma)).log10())
}

/// Noise level giving `snr_db` for a channel of gain `gain = sin(2ks)`.
pub fn sigma_for_snr<T: Real>(gain: T, snr_db: T) -> T {
    gain.abs() / (T::lit(3.0) * T::lit(10.0).powf(snr_db / T::lit(10.0))).sqrt()
}

/// `lambda / 8`, where `sin(2ks) = 1`.
pub fn optimal_pit_depth<T: Real>(wavelength_m: T) -> T {
    wavelength_m / T::lit(8.0)
}

/// `exp(-J^2 / PW^2) s`.
pub fn effective_depth<T: Real>(depth_m: T, j_m: T, jitter: &JitterParams<T>) -> T {
    let x = j_m / jitter.pulse_width;
    (-x * x).exp() * depth_m
}

/// One read of a multi-row array: all rows see the same positioning error.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayReadFrame<T> {
    pub rows: Vec<ReceivedVector<T>>,
    effective_depth: T,
    gain: T,
}

impl<T: Real> ArrayReadFrame<T> {
    pub fn new(rows: Vec<ReceivedVector<T>>, effective_depth: T, gain: T) -> Self {
        Self {
            rows,
            effective_depth,
            gain,
        }
    }

    /// Hidden effective depth `s_i`. Only genie evaluation may look at it.
    pub fn genie_effective_depth(&self) -> T {
        self.effective_depth
    }

    /// Hidden gain `sin(2 k s_i)`. Only genie evaluation may look at it.
    pub fn genie_gain(&self) -> T {
        self.gain
    }
}

/// Draws one positioning error for the frame, then transmits every row at the
/// reduced depth with its own noise stream.
pub fn simulate_array_read<T, R>(
    rows_of_trits: &[TritSequence],
    geom: &ArrayGeometry<T>,
    noise: &NoiseParams<T>,
    jitter: &JitterParams<T>,
    rng: &mut R,
) -> Result<ArrayReadFrame<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if let Some(first) = rows_of_trits.first() {
        if let Some(bad) = rows_of_trits.iter().find(|r| r.len() != first.len()) {
            return Err(Error::LengthMismatch {
                expected: first.len(),
                actual: bad.len(),
            });
        }
    }
    let j = if jitter.sigma_j > T::zero() {
        Normal::new(T::zero(), jitter.sigma_j)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .sample(rng)
    } else {
        T::zero()
    };
    let depth = effective_depth(geom.depth(), j, jitter);
    let gain = (T::lit(2.0) * geom.wavenumber() * depth).sin();
    let row_base: u64 = rng.random();
    let rows = rows_of_trits
        .iter()
        .enumerate()
        .map(|(i, trits)| {
            let mut row_rng = rng_for(&[row_base, i as u64]);
            let mut out = Vec::with_capacity(trits.len());
            transmit_into(trits, gain, noise.sigma, &mut row_rng, &mut out);
            ReceivedVector(out)
        })
        .collect();
    Ok(ArrayReadFrame::new(rows, depth, gain))
}
