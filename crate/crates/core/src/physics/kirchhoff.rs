//! Direct numerical evaluation of the scalar Kirchhoff integral over the
//! reflective strips, using the large-argument form of the 2-D Green's
//! function. This is the reference the far-field formulas are checked against.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::physics::fraunhofer::check_far_field;
use crate::physics::quadrature::GaussLegendre;
use crate::physics::{envelope, ArrayGeometry, BitPattern, IntensityScale, ObservationPoint};
use crate::scalar::Real;

const RULE_POINTS: usize = 16;
const MIN_NODES: usize = 64;
/// Nodes per `2 pi` of phase swing across a strip.
const NODES_PER_CYCLE: f64 = 20.0;
const MAX_NODES: usize = 1 << 16;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Composite Gauss-Legendre evaluator for one geometry.
#[derive(Debug, Clone)]
pub struct KirchhoffSolver<T> {
    geom: ArrayGeometry<T>,
    rule: GaussLegendre<T>,
    tolerance: T,
}

impl<T: Real> KirchhoffSolver<T> {
    pub fn new(geom: ArrayGeometry<T>) -> Result<Self> {
        check_far_field(&geom, geom.sensor_distance())?;
        Ok(Self {
            geom,
            rule: GaussLegendre::new(RULE_POINTS),
            tolerance: T::lit(DEFAULT_TOLERANCE),
        })
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn geometry(&self) -> &ArrayGeometry<T> {
        &self.geom
    }

    /// Phase `k (V + R)` common to every strip at `obs`; strip integrals are
    /// returned relative to it so that phases of order `10^6` rad never have to
    /// be resolved node by node.
    pub fn reference_phase(&self, obs: &ObservationPoint<T>) -> T {
        self.geom.wavenumber() * (self.geom.sensor_distance() + obs.distance())
    }

    /// Contribution of strip `strip`, deflected or not, divided by
    /// `exp(i k (V + R))`.
    pub fn strip_integral(
        &self,
        strip: usize,
        deflected: bool,
        obs: &ObservationPoint<T>,
    ) -> Result<Complex<T>> {
        let g = &self.geom;
        let k = g.wavenumber();
        let a = g.half_width();
        let v = g.sensor_distance();
        let centre = g.cantilever_center(strip);
        let dv = if deflected { g.depth() } else { T::zero() };
        let vn = v + dv;
        let h = obs.h;
        let r = obs.distance();

        let lo = centre - a;
        let hi = centre + a;
        let nearest = if h < lo {
            lo - h
        } else if h > hi {
            h - hi
        } else {
            T::zero()
        };
        check_far_field(g, nearest.hypot(vn))?;

        let vn_sq_minus_v_sq = dv * (vn + v);
        let pi4 = T::FRAC_PI_4();
        let two_k_over_pi = T::lit(2.0) * k / T::PI();
        let integrand = |x: T| {
            let dx = x - h;
            let rho = dx.hypot(vn);
            let excess = (x * x - T::lit(2.0) * x * h + vn_sq_minus_v_sq) / (rho + r);
            let amp = (two_k_over_pi / rho).sqrt() * (T::one() + v / rho);
            Complex::from_polar(amp, k * excess - pi4)
        };

        let swing = k * g.width() * obs.theta().sin().abs();
        let wanted = (NODES_PER_CYCLE * swing.as_f64() / std::f64::consts::TAU).ceil() as usize;
        let mut panels = wanted.max(MIN_NODES).div_ceil(RULE_POINTS);
        let mut coarse: Complex<T> = self.rule.integrate_composite(lo, hi, panels, integrand);
        loop {
            panels *= 2;
            let fine: Complex<T> = self.rule.integrate_composite(lo, hi, panels, integrand);
            let change = (fine - coarse).norm();
            let size = fine.norm();
            if change <= self.tolerance * size || (size == T::zero() && change == T::zero()) {
                let incident = Complex::from_polar(T::one(), k * dv);
                return Ok(incident * fine / T::lit(4.0));
            }
            if panels * RULE_POINTS >= MAX_NODES {
                return Err(Error::QuadratureNonConvergence {
                    nodes: panels * RULE_POINTS,
                    change: (change / size).as_f64(),
                });
            }
            coarse = fine;
        }
    }

    /// Full field at `obs`, including the reference phase.
    pub fn field(&self, bits: &BitPattern, obs: &ObservationPoint<T>) -> Result<Complex<T>> {
        let relative = self.relative_field(bits, obs)?;
        Ok(relative * Complex::from_polar(T::one(), self.reference_phase(obs)))
    }

    fn relative_field(&self, bits: &BitPattern, obs: &ObservationPoint<T>) -> Result<Complex<T>> {
        self.check_len(bits)?;
        let mut total = Complex::new(T::zero(), T::zero());
        for (n, &b) in bits.bits().iter().enumerate() {
            total += self.strip_integral(n, b, obs)?;
        }
        Ok(total)
    }

    pub fn intensity(
        &self,
        bits: &BitPattern,
        obs: &ObservationPoint<T>,
        scale: IntensityScale,
    ) -> Result<T> {
        let i = self.relative_field(bits, obs)?.norm_sqr();
        Ok(match scale {
            IntensityScale::Absolute => i,
            IntensityScale::Normalized => i / envelope(&self.geom, obs.q(self.geom.wavenumber())),
        })
    }

    /// Precomputes every strip in both states at every point. The field of
    /// any bit pattern is then a sum of `N` table entries.
    pub fn strip_table(&self, points: &[ObservationPoint<T>]) -> Result<StripFieldTable<T>> {
        let n = self.geom.n_cantilevers();
        let mut data = Vec::with_capacity(2 * n * points.len());
        for strip in 0..n {
            for deflected in [false, true] {
                for obs in points {
                    data.push(self.strip_integral(strip, deflected, obs)?);
                }
            }
        }
        let envelopes = points
            .iter()
            .map(|p| envelope(&self.geom, p.q(self.geom.wavenumber())))
            .collect();
        Ok(StripFieldTable {
            n_strips: n,
            n_points: points.len(),
            data,
            envelopes,
        })
    }

    fn check_len(&self, bits: &BitPattern) -> Result<()> {
        if bits.len() != self.geom.n_cantilevers() {
            return Err(Error::LengthMismatch {
                expected: self.geom.n_cantilevers(),
                actual: bits.len(),
            });
        }
        Ok(())
    }
}

/// Per-strip Kirchhoff integrals for a fixed set of observation points.
#[derive(Debug, Clone)]
pub struct StripFieldTable<T> {
    n_strips: usize,
    n_points: usize,
    data: Vec<Complex<T>>,
    envelopes: Vec<T>,
}

impl<T: Real> StripFieldTable<T> {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    fn entry(&self, strip: usize, deflected: bool, point: usize) -> Complex<T> {
        self.data[(2 * strip + usize::from(deflected)) * self.n_points + point]
    }

    /// Field at point `point`, relative to the reference phase.
    pub fn field(&self, bits: &BitPattern, point: usize) -> Complex<T> {
        assert_eq!(bits.len(), self.n_strips, "pattern length");
        bits.bits()
            .iter()
            .enumerate()
            .map(|(n, &b)| self.entry(n, b, point))
            .sum()
    }

    /// Intensities at every point.
    pub fn intensities(&self, bits: &BitPattern, scale: IntensityScale) -> Vec<T> {
        (0..self.n_points)
            .map(|m| {
                let i = self.field(bits, m).norm_sqr();
                match scale {
                    IntensityScale::Absolute => i,
                    IntensityScale::Normalized => i / self.envelopes[m],
                }
            })
            .collect()
    }
}

/// Field of `bits` at `obs` by direct quadrature of the strip integrals.
pub fn kirchhoff_field<T: Real>(
    geom: &ArrayGeometry<T>,
    bits: &BitPattern,
    obs: &ObservationPoint<T>,
) -> Result<Complex<T>> {
    KirchhoffSolver::new(*geom)?.field(bits, obs)
}
