use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::config::{ConfigError, ExperimentConfig, ExperimentKind};
use super::stats::{ErrorCount, TerCurve, TerRow};
use crate::channel::{
    sigma_for_snr, simulate_array_read, transmit_into, JitterParams, NoiseParams,
};
use crate::detect::{estimate_scale, threshold_detect_into, SequenceDetector, MIN_DETECTOR_SCALE};
use crate::error::Error;
use crate::modem::{
    decode_trits_to_bits, demodulate, encode_bits_to_trits, frame_trits, lowpass_decimate,
    oversampled_grid, recover_trits_noiseless, trits_to_indentations, SampledIntensity, Trit,
    TritSequence,
};
use crate::physics::{fraunhofer_intensity, IntensityScale, KirchhoffSolver, ObservationPoint};
use crate::seeds::rng_for;
use crate::Geometry;

/// Failure of an experiment run: bad configuration or a numerical error.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] Error),
}

fn require_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<(), ConfigError> {
    if cfg.kind != kind {
        return Err(ConfigError::Invalid(format!(
            "expected a {kind} configuration, got {}",
            cfg.kind
        )));
    }
    cfg.validate()
}

/// Splits `units` work items into batches of at most `batch`.
fn batches(units: u64, batch: u64) -> Vec<(u64, u64)> {
    let count = units.div_ceil(batch);
    (0..count)
        .map(|b| (b, batch.min(units - b * batch)))
        .collect()
}

/// Runs every batch under its own seed and sums the per-detector counts.
fn run_batches<const D: usize, F>(
    cfg: &ExperimentConfig,
    point: &[u64],
    units: u64,
    work: F,
) -> Result<[ErrorCount; D], Error>
where
    F: Fn(&mut ChaCha8Rng, u64) -> Result<[ErrorCount; D], Error> + Sync,
{
    batches(units, cfg.batch)
        .into_par_iter()
        .map(|(b, size)| {
            let mut path = point.to_vec();
            path.push(b);
            let mut rng = rng_for(&[cfg.unit_seed(&path)]);
            work(&mut rng, size)
        })
        .try_reduce(
            || [ErrorCount::default(); D],
            |a, b| {
                let mut out = a;
                for (o, x) in out.iter_mut().zip(b) {
                    *o = *o + x;
                }
                Ok(out)
            },
        )
}

fn random_trits(rng: &mut impl Rng, len: usize, buf: &mut Vec<Trit>) {
    buf.clear();
    buf.extend((0..len).map(|_| Trit::ALL[rng.random_range(0..3)]));
}

fn errors(a: &[Trit], b: &[Trit]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Reusable per-batch buffers for one detection pass.
struct Workspace {
    trits: Vec<Trit>,
    received: Vec<f64>,
    decided: Vec<Trit>,
    ml: SequenceDetector<f64>,
}

impl Workspace {
    fn new() -> Self {
        Self {
            trits: Vec::new(),
            received: Vec::new(),
            decided: Vec::new(),
            ml: SequenceDetector::new(),
        }
    }

    /// Draws a random trit vector and transmits it; returns the trits.
    fn transmit(
        &mut self,
        rng: &mut ChaCha8Rng,
        len: usize,
        gain: f64,
        sigma: f64,
    ) -> TritSequence {
        random_trits(rng, len, &mut self.trits);
        let seq = TritSequence::new(std::mem::take(&mut self.trits));
        transmit_into(&seq, gain, sigma, rng, &mut self.received);
        seq
    }

    fn threshold_errors(
        &mut self,
        values: &[f64],
        scale: f64,
        truth: &[Trit],
    ) -> Result<u64, Error> {
        threshold_detect_into(values, scale, &mut self.decided)?;
        Ok(errors(&self.decided, truth))
    }

    fn ml_errors(&mut self, values: &[f64], scale: f64, truth: &[Trit]) -> Result<u64, Error> {
        self.ml.detect_into(values, scale, &mut self.decided)?;
        Ok(errors(&self.decided, truth))
    }
}

fn signal_gain(geom: &Geometry) -> Result<f64, ConfigError> {
    let gain = geom.signal_scale();
    if gain < MIN_DETECTOR_SCALE {
        return Err(ConfigError::Invalid(format!(
            "depth gives signal scale sin(2ks) = {gain}; choose 0 < s < lambda/4"
        )));
    }
    Ok(gain)
}

/// TER of the threshold and ML detectors against SNR, at the configured
/// depth. `trials` counts trits per point, rounded up to whole vectors.
pub fn run_ter_sweep(cfg: &ExperimentConfig) -> Result<TerCurve, RunError> {
    require_kind(cfg, ExperimentKind::TerSweep)?;
    let geom = cfg.geometry()?;
    let gain = signal_gain(&geom)?;
    let len = cfg.n / 2;
    let vectors = cfg.trials.div_ceil(len as u64);
    let mut curve = TerCurve::default();
    for (p, &snr) in cfg.snr_db.iter().enumerate() {
        let sigma = sigma_for_snr(gain, snr);
        let [th, ml] = run_batches(cfg, &[p as u64], vectors, |rng, size| {
            let mut ws = Workspace::new();
            let mut counts = [ErrorCount::default(); 2];
            for _ in 0..size {
                let seq = ws.transmit(rng, len, gain, sigma);
                let received = std::mem::take(&mut ws.received);
                counts[0].errors += ws.threshold_errors(&received, gain, seq.as_slice())?;
                counts[1].errors += ws.ml_errors(&received, gain, seq.as_slice())?;
                ws.received = received;
                ws.trits = seq.into_inner();
            }
            for c in &mut counts {
                c.trials = size * len as u64;
            }
            Ok(counts)
        })?;
        curve.push(TerRow::new(snr, "threshold", th));
        curve.push(TerRow::new(snr, "ml", ml));
    }
    Ok(curve)
}

/// Detection under a global positioning error shared by all rows of a read.
/// LLN detectors scale by the pooled moment estimate; genie detectors by the
/// true frame gain. `trials` counts frames per SNR point.
pub fn run_jitter_experiment(cfg: &ExperimentConfig) -> Result<TerCurve, RunError> {
    require_kind(cfg, ExperimentKind::Jitter)?;
    let geom = cfg.geometry()?;
    let gain = signal_gain(&geom)?;
    let len = cfg.n / 2;
    let pulse_width = cfg.pulse_width_nm * 1e-9;
    let jitter = JitterParams::new(cfg.sigma_j_over_pw * pulse_width, pulse_width)?;
    let labels = ["threshold-lln", "threshold-genie", "ml-lln", "ml-genie"];
    let mut curve = TerCurve::default();
    for (p, &snr) in cfg.snr_db.iter().enumerate() {
        let sigma = sigma_for_snr(gain, snr);
        let noise = NoiseParams::new(sigma, 0)?;
        let counts: [ErrorCount; 5] = run_batches(cfg, &[p as u64], cfg.trials, |rng, size| {
            let mut ws = Workspace::new();
            let mut counts = [ErrorCount::default(); 5];
            for _ in 0..size {
                let rows: Vec<TritSequence> = (0..cfg.rows)
                    .map(|_| {
                        random_trits(rng, len, &mut ws.trits);
                        TritSequence::new(ws.trits.clone())
                    })
                    .collect();
                let frame = simulate_array_read(&rows, &geom, &noise, &jitter, rng)?;
                let estimate = estimate_scale(&frame, sigma);
                let lln = estimate.c_n.max(MIN_DETECTOR_SCALE);
                let genie = frame.genie_gain().max(MIN_DETECTOR_SCALE);
                for (row, truth) in frame.rows.iter().zip(&rows) {
                    let (v, t) = (row.values(), truth.as_slice());
                    counts[0].errors += ws.threshold_errors(v, lln, t)?;
                    counts[1].errors += ws.threshold_errors(v, genie, t)?;
                    counts[2].errors += ws.ml_errors(v, lln, t)?;
                    counts[3].errors += ws.ml_errors(v, genie, t)?;
                }
                counts[4].errors += u64::from(estimate.clamped);
            }
            let trits = size * (cfg.rows * len) as u64;
            for c in &mut counts[..4] {
                c.trials = trits;
            }
            counts[4].trials = size;
            Ok(counts)
        })?;
        for (label, count) in labels.iter().zip(&counts) {
            curve.push(TerRow::new(snr, *label, *count));
        }
        if counts[4].errors > 0 {
            curve.notes.push(format!(
                "snr_db {snr}: scale estimate clamped in {} of {} frames",
                counts[4].errors, counts[4].trials
            ));
        }
    }
    Ok(curve)
}

/// ML TER against indentation depth for several laser wavelengths, with the
/// noise fixed so that the optimal depth `lambda/8` sees `optimal_snr_db`.
/// Rows are labelled `ml-<lambda>nm`; `parameter` is the depth in nm.
pub fn run_pit_depth_sweep(cfg: &ExperimentConfig) -> Result<TerCurve, RunError> {
    require_kind(cfg, ExperimentKind::PitDepth)?;
    let len = cfg.n / 2;
    let vectors = cfg.trials.div_ceil(len as u64);
    let sigma = sigma_for_snr(1.0, cfg.optimal_snr_db);
    let mut curve = TerCurve::default();
    for (wi, &lambda_nm) in cfg.wavelengths_nm.iter().enumerate() {
        let label = format!("ml-{lambda_nm}nm");
        let k = std::f64::consts::TAU / (lambda_nm * 1e-9);
        for (di, &depth_nm) in cfg.depths_nm.iter().enumerate() {
            let gain = (2.0 * k * depth_nm * 1e-9).sin();
            if gain < MIN_DETECTOR_SCALE {
                return Err(ConfigError::Invalid(format!(
                    "depth {depth_nm} nm has no signal at {lambda_nm} nm"
                ))
                .into());
            }
            let [ml] = run_batches(cfg, &[wi as u64, di as u64], vectors, |rng, size| {
                let mut ws = Workspace::new();
                let mut count = ErrorCount::new(0, size * len as u64);
                for _ in 0..size {
                    let seq = ws.transmit(rng, len, gain, sigma);
                    let received = std::mem::take(&mut ws.received);
                    count.errors += ws.ml_errors(&received, gain, seq.as_slice())?;
                    ws.received = received;
                    ws.trits = seq.into_inner();
                }
                Ok([count])
            })?;
            curve.push(TerRow::new(depth_nm, label.as_str(), ml));
        }
    }
    Ok(curve)
}

/// `Im f(n)`, `n = 1 ..= N/2`, demodulated from the Kirchhoff intensity of
/// every trit sequence, indexed like [`TritSequence::from_index`].
///
/// The intensity is sampled on a `factor`-times oversampled grid, low-passed
/// to the information band, decimated and demodulated.
pub fn fresnel_signal_table(geom: &Geometry, factor: usize) -> Result<Vec<Vec<f64>>, Error> {
    let n = geom.n_cantilevers();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    let len = n / 2;
    let k = geom.wavenumber();
    let v = geom.sensor_distance();
    let points: Vec<_> = oversampled_grid(n, geom.pitch(), factor)
        .into_iter()
        .map(|q| ObservationPoint::at_q(q, k, v))
        .collect();
    let table = KirchhoffSolver::new(*geom)?.strip_table(&points)?;
    (0..3usize.pow(len as u32))
        .into_par_iter()
        .map(|index| {
            let bits = trits_to_indentations(&TritSequence::from_index(index, len));
            let samples = table.intensities(&bits, IntensityScale::Normalized);
            let coeffs = demodulate(&lowpass_decimate(n, factor, &samples)?)?;
            Ok((1..=len as isize).map(|i| coeffs.get(i).im).collect())
        })
        .collect()
}

/// TER against Fresnel number at a fixed SNR. Rows `ml` / `threshold` use the
/// Kirchhoff intensity; `ml-fraunhofer` / `threshold-fraunhofer` are the
/// far-field baseline driven by the same noise.
pub fn run_fresnel_sweep(cfg: &ExperimentConfig) -> Result<TerCurve, RunError> {
    require_kind(cfg, ExperimentKind::Fresnel)?;
    let base = cfg.geometry()?;
    let gain = signal_gain(&base)?;
    let len = cfg.n / 2;
    let sigma = sigma_for_snr(gain, cfg.snr_db[0]);
    let vectors = cfg.trials.div_ceil(len as u64);
    let patterns = 3usize.pow(len as u32);
    let mut curve = TerCurve::default();
    for (p, &fresnel) in cfg.fresnel.iter().enumerate() {
        let geom = base.with_fresnel_number(fresnel)?;
        let signals = fresnel_signal_table(&geom, cfg.oversample)?;
        let counts: [ErrorCount; 4] = run_batches(cfg, &[p as u64], vectors, |rng, size| {
            let mut ws = Workspace::new();
            let mut near = vec![0.0; len];
            let mut far = vec![0.0; len];
            let mut counts = [ErrorCount::default(); 4];
            for _ in 0..size {
                let index = rng.random_range(0..patterns);
                let truth = TritSequence::from_index(index, len);
                for ((i, s), signal) in truth.partial_sums().iter().enumerate().zip(&signals[index])
                {
                    let w: f64 = StandardNormal.sample(rng);
                    near[i] = signal + sigma * w;
                    far[i] = gain * f64::from(*s) + sigma * w;
                }
                let t = truth.as_slice();
                counts[0].errors += ws.ml_errors(&near, gain, t)?;
                counts[1].errors += ws.threshold_errors(&near, gain, t)?;
                counts[2].errors += ws.ml_errors(&far, gain, t)?;
                counts[3].errors += ws.threshold_errors(&far, gain, t)?;
            }
            for c in &mut counts {
                c.trials = size * len as u64;
            }
            Ok(counts)
        })?;
        let labels = ["ml", "threshold", "ml-fraunhofer", "threshold-fraunhofer"];
        for (label, count) in labels.iter().zip(counts) {
            curve.push(TerRow::new(fresnel, *label, count));
        }
        curve.notes.push(format!(
            "fresnel {fresnel}: sensor distance {} m",
            geom.sensor_distance()
        ));
    }
    Ok(curve)
}

/// Intensity against angle, one row per angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

/// Fraunhofer intensity (and optionally the Kirchhoff intensity) of the
/// configured bit pattern over `theta in [-theta_max, theta_max]`.
pub fn emit_diffraction_profile(cfg: &ExperimentConfig) -> Result<Profile, RunError> {
    require_kind(cfg, ExperimentKind::Profile)?;
    let geom = cfg.geometry()?;
    let bits = cfg.bit_pattern()?;
    let k = geom.wavenumber();
    let solver = if cfg.kirchhoff {
        Some(KirchhoffSolver::new(geom)?)
    } else {
        None
    };
    let step = 2.0 * cfg.theta_max / (cfg.theta_points - 1) as f64;
    let rows = (0..cfg.theta_points)
        .into_par_iter()
        .map(|i| {
            let theta = -cfg.theta_max + step * i as f64;
            let mut row = vec![
                theta,
                fraunhofer_intensity(&geom, &bits, k * theta, IntensityScale::Absolute),
            ];
            if let Some(s) = &solver {
                let obs = ObservationPoint::at_angle(theta, geom.sensor_distance());
                row.push(s.intensity(&bits, &obs, IntensityScale::Absolute)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut columns = vec!["theta_rad", "intensity"];
    if cfg.kirchhoff {
        columns.push("kirchhoff_intensity");
    }
    Ok(Profile { columns, rows })
}

/// Outcome of sending a payload through the noiseless chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrip {
    pub decoded: Vec<bool>,
    /// Largest distance of a pre-rounding trit value from its integer.
    pub max_deviation: f64,
}

/// Block-codes `payload`, writes each `N/2`-trit frame as an indentation
/// pattern, synthesizes its normalized intensity on the sampling grid,
/// demodulates, recovers the trits and decodes. The receiver is assumed to
/// know the encoded stream length, so frame padding is discarded.
pub fn noiseless_roundtrip(geom: &Geometry, payload: &[bool]) -> Result<RoundTrip, Error> {
    let n = geom.n_cantilevers();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    let stream = encode_bits_to_trits(payload);
    let mut recovered = Vec::with_capacity(stream.len() + n);
    let mut max_deviation = 0.0f64;
    for frame in frame_trits(&stream, n / 2) {
        let bits = trits_to_indentations(&frame);
        let samples = SampledIntensity::from_pattern(geom, &bits, IntensityScale::Normalized);
        let coeffs = demodulate(&samples)?;
        let out = recover_trits_noiseless(&coeffs, geom.two_ks())?;
        max_deviation = max_deviation.max(out.max_deviation);
        recovered.extend_from_slice(out.trits.as_slice());
    }
    recovered.truncate(stream.len());
    Ok(RoundTrip {
        decoded: decode_trits_to_bits(&recovered)?,
        max_deviation,
    })
}
