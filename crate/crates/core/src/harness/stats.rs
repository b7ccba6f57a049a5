//! Error counting, Wilson intervals and TER curves.

use std::ops::Add;

/// Two-sided 95 % standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `errors` successes out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if errors == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let high = if errors == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (low, high)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ErrorCount {
    pub errors: u64,
    pub trials: u64,
}

impl ErrorCount {
    pub fn new(errors: u64, trials: u64) -> Self {
        Self { errors, trials }
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.errors as f64 / self.trials as f64
        }
    }
}

impl Add for ErrorCount {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            errors: self.errors + rhs.errors,
            trials: self.trials + rhs.trials,
        }
    }
}

/// One point of a TER curve. `trials` counts trits.
#[derive(Debug, Clone, PartialEq)]
pub struct TerRow {
    pub parameter: f64,
    pub trials: u64,
    pub errors: u64,
    pub ter: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub detector: String,
}

impl TerRow {
    pub fn new(parameter: f64, detector: impl Into<String>, count: ErrorCount) -> Self {
        let (ci_low, ci_high) = wilson_interval(count.errors, count.trials);
        Self {
            parameter,
            trials: count.trials,
            errors: count.errors,
            ter: count.rate(),
            ci_low,
            ci_high,
            detector: detector.into(),
        }
    }

    pub fn interval_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    pub fn overlaps(&self, other: &TerRow) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TerCurve {
    pub rows: Vec<TerRow>,
    /// Free-form diagnostics, emitted as comment lines.
    pub notes: Vec<String>,
}

impl TerCurve {
    pub fn push(&mut self, row: TerRow) {
        self.rows.push(row);
    }

    pub fn detector<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a TerRow> + 'a {
        self.rows.iter().filter(move |r| r.detector == name)
    }

    pub fn row(&self, detector: &str, parameter: f64) -> Option<&TerRow> {
        self.rows
            .iter()
            .filter(|r| r.detector == detector)
            .find(|r| (r.parameter - parameter).abs() <= 1e-12 * parameter.abs().max(1.0))
    }

    /// Parameter where the TER of `detector` first drops to `target`, by linear
    /// interpolation of `log10(TER)` between the bracketing points.
    pub fn crossing(&self, detector: &str, target: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .detector(detector)
            .map(|r| (r.parameter, r.ter))
            .collect();
        let lt = target.log10();
        for w in pts.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if y0 >= target && y1 <= target {
                if y1 <= 0.0 {
                    return Some(x1);
                }
                let (l0, l1) = (y0.log10(), y1.log10());
                if (l0 - l1).abs() < f64::EPSILON {
                    return Some(x0);
                }
                return Some(x0 + (x1 - x0) * (l0 - lt) / (l0 - l1));
            }
        }
        None
    }
}
