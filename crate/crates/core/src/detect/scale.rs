use crate::channel::ArrayReadFrame;
use crate::scalar::Real;

/// Law-of-large-numbers estimate of the frame gain `sin(2 k s_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEstimate<T> {
    /// Estimate clamped to `[0, 1]`.
    pub c_n: T,
    /// Number of squared increments pooled.
    pub sample_count: usize,
    /// Whether the raw value fell outside `[0, 1]` (including a negative radicand).
    pub clamped: bool,
}

/// `C = sqrt(3 (RR - 2 sigma^2) / 2)`, where `RR` is the mean squared
/// increment `(R_{n+1} - R_n)^2` pooled over every row of the frame.
pub fn estimate_scale<T: Real>(frame: &ArrayReadFrame<T>, sigma: T) -> ScaleEstimate<T> {
    let mut sum = T::zero();
    let mut count = 0usize;
    for row in &frame.rows {
        for r in row.increments() {
            sum += r * r;
            count += 1;
        }
    }
    if count == 0 {
        return ScaleEstimate {
            c_n: T::zero(),
            sample_count: 0,
            clamped: true,
        };
    }
    let mean_sq = sum / T::from_count(count);
    scale_from_moment(mean_sq, sigma, count)
}

/// Plug-in inversion of `E[r^2] = (2/3) sin^2(2ks) + 2 sigma^2`.
pub fn scale_from_moment<T: Real>(mean_sq: T, sigma: T, sample_count: usize) -> ScaleEstimate<T> {
    let radicand = T::lit(1.5) * (mean_sq - T::lit(2.0) * sigma * sigma);
    let raw = if radicand > T::zero() {
        radicand.sqrt()
    } else {
        T::zero()
    };
    let clamped = radicand < T::zero() || raw > T::one();
    ScaleEstimate {
        c_n: raw.min(T::one()),
        sample_count,
        clamped,
    }
}
