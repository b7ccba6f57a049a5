//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated; `start:step:stop` expands to an inclusive arithmetic
//! grid. Unknown or repeated keys are rejected.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::modem::CountMethod;
use crate::physics::{ArrayGeometry, BitPattern};
use crate::Geometry;

/// Largest array for which the Fresnel study tabulates every trit sequence.
pub const FRESNEL_MAX_CANTILEVERS: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    DuplicateKey(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    TerSweep,
    Jitter,
    PitDepth,
    Fresnel,
    Profile,
    Count,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        Self::TerSweep,
        Self::Jitter,
        Self::PitDepth,
        Self::Fresnel,
        Self::Profile,
        Self::Count,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::TerSweep => "ter-sweep",
            Self::Jitter => "jitter",
            Self::PitDepth => "pit-depth",
            Self::Fresnel => "fresnel",
            Self::Profile => "profile",
            Self::Count => "count",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }

    /// Experiments that run a detector and therefore need even `N`.
    pub fn detects(self) -> bool {
        matches!(
            self,
            Self::TerSweep | Self::Jitter | Self::PitDepth | Self::Fresnel
        )
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::BadValue {
                key: "kind".into(),
                reason: format!("unknown experiment `{s}`"),
            })
    }
}

/// Everything an experiment run depends on. Lengths carry their unit in the
/// field name.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub pitch_um: f64,
    pub width_um: f64,
    pub wavelength_nm: f64,
    /// `None` means `lambda / 8`.
    pub depth_nm: Option<f64>,
    pub distance_m: f64,
    pub snr_db: Vec<f64>,
    /// Per sweep point: trits (ter, pit-depth, fresnel) or frames (jitter).
    pub trials: u64,
    /// Work unit size in received vectors (frames for jitter).
    pub batch: u64,
    pub seed: u64,
    pub rows: usize,
    pub sigma_j_over_pw: f64,
    pub pulse_width_nm: f64,
    pub optimal_snr_db: f64,
    pub wavelengths_nm: Vec<f64>,
    pub depths_nm: Vec<f64>,
    pub fresnel: Vec<f64>,
    pub oversample: usize,
    pub theta_max: f64,
    pub theta_points: usize,
    /// `None` means all zeros.
    pub bits: Option<String>,
    pub kirchhoff: bool,
    pub method: CountMethod,
}

const KEYS: &[&str] = &[
    "batch",
    "bits",
    "depth_nm",
    "depths_nm",
    "distance_m",
    "fresnel",
    "kirchhoff",
    "method",
    "n",
    "optimal_snr_db",
    "oversample",
    "pitch_um",
    "pulse_width_nm",
    "rows",
    "seed",
    "sigma_j_over_pw",
    "snr_db",
    "theta_max",
    "theta_points",
    "trials",
    "wavelength_nm",
    "wavelengths_nm",
    "width_um",
];

fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + step * i as f64).collect()
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut cfg = Self {
            kind,
            n: 20,
            pitch_um: 20.0,
            width_um: 13.9,
            wavelength_nm: 635.0,
            depth_nm: None,
            distance_m: 1.0,
            snr_db: grid(6.0, 0.5, 21),
            trials: 1_000_000,
            batch: 20_000,
            seed: 1,
            rows: 400,
            sigma_j_over_pw: 0.1,
            pulse_width_nm: 10.0,
            optimal_snr_db: 22.0,
            wavelengths_nm: vec![780.0, 650.0, 405.0],
            depths_nm: grid(5.0, 5.0, 20),
            fresnel: vec![1.0, 0.3, 0.1, 0.03, 0.01, 0.001],
            oversample: 16,
            theta_max: 0.1,
            theta_points: 2001,
            bits: None,
            kirchhoff: false,
            method: CountMethod::Formula,
        };
        match kind {
            ExperimentKind::Jitter => {
                cfg.n = 10;
                cfg.snr_db = vec![6.0, 8.0, 10.0, 12.0, 14.0];
                cfg.trials = 10_000;
                cfg.batch = 50;
            }
            ExperimentKind::Fresnel => {
                cfg.n = 10;
                cfg.snr_db = vec![13.0];
            }
            ExperimentKind::Profile => cfg.n = 5,
            ExperimentKind::Count => cfg.n = 10,
            ExperimentKind::TerSweep | ExperimentKind::PitDepth => {}
        }
        cfg
    }

    /// Named parameter sets. `paper-fig4` is the five-cantilever bench
    /// geometry with a flat medium.
    pub fn preset(kind: ExperimentKind, name: &str) -> Result<Self, ConfigError> {
        match name {
            "paper-fig4" => {
                let mut cfg = Self::defaults(kind);
                cfg.n = 5;
                cfg.pitch_um = 20.0;
                cfg.width_um = 13.9;
                cfg.wavelength_nm = 635.0;
                cfg.distance_m = 1.0;
                cfg.bits = None;
                Ok(cfg)
            }
            other => Err(ConfigError::UnknownPreset(other.to_string())),
        }
    }

    pub fn from_file(kind: ExperimentKind, path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let mut cfg = Self::defaults(kind);
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn parse(kind: ExperimentKind, text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::defaults(kind);
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::DuplicateKey(key.to_string()));
            }
            self.set(key, value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: String| ConfigError::BadValue {
            key: key.to_string(),
            reason,
        };
        let num = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("`{v}`: {e}")));
        let int = |v: &str| {
            v.replace('_', "")
                .parse::<u64>()
                .or_else(|e| match v.parse::<f64>() {
                    Ok(f) if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 => Ok(f as u64),
                    _ => Err(bad(format!("`{v}`: {e}"))),
                })
        };
        let list = |v: &str| -> Result<Vec<f64>, ConfigError> {
            if let [a, b, c] = v.split(':').map(str::trim).collect::<Vec<_>>()[..] {
                let (start, step, stop) = (num(a)?, num(b)?, num(c)?);
                if !(step > 0.0) || stop < start {
                    return Err(bad(format!("range `{v}` needs step > 0 and stop >= start")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                return Ok(grid(start, step, count));
            }
            v.split(',').map(|x| num(x.trim())).collect()
        };
        match key {
            "n" => self.n = int(value)? as usize,
            "pitch_um" => self.pitch_um = num(value)?,
            "width_um" => self.width_um = num(value)?,
            "wavelength_nm" => self.wavelength_nm = num(value)?,
            "depth_nm" => {
                self.depth_nm = match value {
                    "optimal" => None,
                    v => Some(num(v)?),
                }
            }
            "distance_m" => self.distance_m = num(value)?,
            "snr_db" => self.snr_db = list(value)?,
            "trials" => self.trials = int(value)?,
            "batch" => self.batch = int(value)?,
            "seed" => self.seed = int(value)?,
            "rows" => self.rows = int(value)? as usize,
            "sigma_j_over_pw" => self.sigma_j_over_pw = num(value)?,
            "pulse_width_nm" => self.pulse_width_nm = num(value)?,
            "optimal_snr_db" => self.optimal_snr_db = num(value)?,
            "wavelengths_nm" => self.wavelengths_nm = list(value)?,
            "depths_nm" => self.depths_nm = list(value)?,
            "fresnel" => self.fresnel = list(value)?,
            "oversample" => self.oversample = int(value)? as usize,
            "theta_max" => self.theta_max = num(value)?,
            "theta_points" => self.theta_points = int(value)? as usize,
            "bits" => {
                BitPattern::from_str(value).map_err(|e| bad(e.to_string()))?;
                self.bits = Some(value.to_string());
            }
            "kirchhoff" => {
                self.kirchhoff = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    v => return Err(bad(format!("`{v}` is not a boolean"))),
                }
            }
            "method" => {
                self.method = match value {
                    "formula" => CountMethod::Formula,
                    "brute" | "brute-force" => CountMethod::BruteForce,
                    v => return Err(bad(format!("`{v}` is not `formula` or `brute`"))),
                }
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.trials < 1 {
            return invalid("trials must be at least 1".into());
        }
        if self.batch < 1 {
            return invalid("batch must be at least 1".into());
        }
        if self.n < 1 {
            return invalid("n must be at least 1".into());
        }
        if self.kind.detects() && !self.n.is_multiple_of(2) {
            return invalid(format!(
                "{} needs an even number of cantilevers, got {}",
                self.kind, self.n
            ));
        }
        let monotone = |name: &str, v: &[f64]| -> Result<(), ConfigError> {
            if v.is_empty() {
                return Err(ConfigError::Invalid(format!("{name} grid is empty")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(ConfigError::Invalid(format!(
                    "{name} grid has a non-finite value"
                )));
            }
            let up = v.windows(2).all(|w| w[1] > w[0]);
            let down = v.windows(2).all(|w| w[1] < w[0]);
            if !(up || down) {
                return Err(ConfigError::Invalid(format!(
                    "{name} grid is not strictly monotone"
                )));
            }
            Ok(())
        };
        match self.kind {
            ExperimentKind::TerSweep | ExperimentKind::Jitter => monotone("snr_db", &self.snr_db)?,
            ExperimentKind::PitDepth => {
                monotone("wavelengths_nm", &self.wavelengths_nm)?;
                monotone("depths_nm", &self.depths_nm)?;
                if self.depths_nm.iter().any(|&d| d <= 0.0)
                    || self.wavelengths_nm.iter().any(|&w| w <= 0.0)
                {
                    return invalid("depths and wavelengths must be positive".into());
                }
            }
            ExperimentKind::Fresnel => {
                monotone("fresnel", &self.fresnel)?;
                if self.snr_db.len() != 1 {
                    return invalid("fresnel runs at a single snr_db".into());
                }
                if self.fresnel.iter().any(|&f| f <= 0.0) {
                    return invalid("Fresnel numbers must be positive".into());
                }
                if self.n > FRESNEL_MAX_CANTILEVERS {
                    return invalid(format!(
                        "fresnel supports at most {FRESNEL_MAX_CANTILEVERS} cantilevers"
                    ));
                }
                if self.oversample < 1 {
                    return invalid("oversample must be at least 1".into());
                }
            }
            ExperimentKind::Profile => {
                if self.theta_points < 2 || !(self.theta_max > 0.0) {
                    return invalid("profile needs theta_points >= 2 and theta_max > 0".into());
                }
                if let Some(bits) = &self.bits {
                    if bits.len() != self.n {
                        return invalid(format!(
                            "bits has {} digits for n = {}",
                            bits.len(),
                            self.n
                        ));
                    }
                }
            }
            ExperimentKind::Count => {}
        }
        if self.kind == ExperimentKind::Jitter {
            if self.rows < 1 {
                return invalid("rows must be at least 1".into());
            }
            if !(self.sigma_j_over_pw >= 0.0) || !(self.pulse_width_nm > 0.0) {
                return invalid("need sigma_j_over_pw >= 0 and pulse_width_nm > 0".into());
            }
        }
        if self.kind != ExperimentKind::Count && self.kind != ExperimentKind::PitDepth {
            self.geometry()?;
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_nm * 1e-9
    }

    pub fn depth_m(&self) -> f64 {
        self.depth_nm
            .map_or(self.wavelength_m() / 8.0, |d| d * 1e-9)
    }

    pub fn geometry(&self) -> Result<Geometry, ConfigError> {
        ArrayGeometry::new(
            self.n,
            self.pitch_um * 1e-6,
            self.width_um * 1e-6,
            self.wavelength_m(),
            self.depth_m(),
            self.distance_m,
        )
        .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn bit_pattern(&self) -> Result<BitPattern, ConfigError> {
        match &self.bits {
            None => Ok(BitPattern::zeros(self.n)),
            Some(s) => BitPattern::from_str(s).map_err(|e| ConfigError::BadValue {
                key: "bits".into(),
                reason: e.to_string(),
            }),
        }
    }

    /// Seed for one work unit, independent of scheduling order.
    pub fn unit_seed(&self, path: &[u64]) -> u64 {
        let mut parts = vec![self.seed, self.kind.tag()];
        parts.extend_from_slice(path);
        crate::seeds::derive_seed(&parts)
    }

    /// Every key with its effective value, one per line, sorted by key.
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut out = format!("kind = {}\n", self.kind);
        for key in KEYS {
            let value = match *key {
                "batch" => self.batch.to_string(),
                "bits" => self.bits.clone().unwrap_or_else(|| "0".repeat(self.n)),
                "depth_nm" => self.depth_nm.map_or("optimal".into(), |d| d.to_string()),
                "depths_nm" => list(&self.depths_nm),
                "distance_m" => self.distance_m.to_string(),
                "fresnel" => list(&self.fresnel),
                "kirchhoff" => self.kirchhoff.to_string(),
                "method" => match self.method {
                    CountMethod::Formula => "formula".into(),
                    CountMethod::BruteForce => "brute".into(),
                },
                "n" => self.n.to_string(),
                "optimal_snr_db" => self.optimal_snr_db.to_string(),
                "oversample" => self.oversample.to_string(),
                "pitch_um" => self.pitch_um.to_string(),
                "pulse_width_nm" => self.pulse_width_nm.to_string(),
                "rows" => self.rows.to_string(),
                "seed" => self.seed.to_string(),
                "sigma_j_over_pw" => self.sigma_j_over_pw.to_string(),
                "snr_db" => list(&self.snr_db),
                "theta_max" => self.theta_max.to_string(),
                "theta_points" => self.theta_points.to_string(),
                "trials" => self.trials.to_string(),
                "wavelength_nm" => self.wavelength_nm.to_string(),
                "wavelengths_nm" => list(&self.wavelengths_nm),
                "width_um" => self.width_um.to_string(),
                _ => unreachable!("key list out of sync"),
            };
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }

    /// SHA-256 of [`canonical`](Self::canonical), hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}
