//! Independent oracles and property checks shared by the integration tests
//! and the acceptance runner. Each check returns a short summary on success.

#![allow(dead_code)]

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::Rng;

use probe_readout::channel::{simulate_array_read, JitterParams, NoiseParams};
use probe_readout::detect::estimate_scale;
use probe_readout::harness::{output, run_ter_sweep, ExperimentConfig, ExperimentKind};
use probe_readout::modem::{recover_trits_noiseless, trits_to_indentations, Trit, TritSequence};
use probe_readout::physics::{fraunhofer_intensity, structure_factor, BitPattern, IntensityScale};
use probe_readout::Geometry;

pub type Check = Result<String, String>;

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

pub fn bits_of(value: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| value >> i & 1 == 1).collect()
}

/// `|sum_n exp(2iks b_n) exp(-iqnd)|^2`, summed term by term.
pub fn direct_intensity(bits: &[bool], two_ks: f64, qd: f64) -> f64 {
    bits.iter()
        .enumerate()
        .map(|(n, &b)| {
            let phase = if b { two_ks } else { 0.0 } - qd * n as f64;
            Complex64::from_polar(1.0, phase)
        })
        .sum::<Complex64>()
        .norm_sqr()
}

/// Orbit count of `b -> 1 - reverse(b)` by canonical representatives.
pub fn orbit_count(n: usize) -> u64 {
    let mut seen = HashSet::new();
    for v in 0..1u64 << n {
        let b = bits_of(v, n);
        let image: Vec<bool> = b.iter().rev().map(|x| !x).collect();
        seen.insert(b.clone().min(image));
    }
    seen.len() as u64
}

/// Number of distinct normalized intensity vectors on the sampling grid.
pub fn distinct_intensity_count(n: usize, two_ks: f64) -> u64 {
    let m = 2 * n as i64 - 1;
    let mut seen = HashSet::new();
    for v in 0..1u64 << n {
        let b = bits_of(v, n);
        let key: Vec<i64> = (-(n as i64 - 1)..n as i64)
            .map(|k| {
                let qd = 2.0 * PI * k as f64 / m as f64;
                (direct_intensity(&b, two_ks, qd) * 1e8).round() as i64
            })
            .collect();
        seen.insert(key);
    }
    seen.len() as u64
}

/// Exhaustive minimum of `sum_n (R_n/scale - T_n)^2` over all trit
/// sequences. Among equal metrics the walk that is smallest when compared
/// from the last slice backwards wins.
pub fn brute_force_ml(values: &[f64], scale: f64) -> (f64, Vec<i32>) {
    let len = values.len();
    let mut best: Option<(f64, Vec<i32>, Vec<i32>)> = None;
    for index in 0..3usize.pow(len as u32) {
        let mut rest = index;
        let mut walk = Vec::with_capacity(len);
        let mut trits = Vec::with_capacity(len);
        let mut sum = 0;
        let mut metric = 0.0;
        for y in values {
            let t = (rest % 3) as i32 - 1;
            rest /= 3;
            sum += t;
            trits.push(t);
            walk.push(sum);
            let d = y / scale - f64::from(sum);
            metric += d * d;
        }
        let better = match &best {
            None => true,
            Some((m, _, w)) => {
                metric < *m || (metric == *m && walk.iter().rev().lt(w.iter().rev()))
            }
        };
        if better {
            best = Some((metric, trits, walk));
        }
    }
    let (m, t, _) = best.expect("non-empty search");
    (m, t)
}

fn trit_strategy(max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(-1i32..=1, 1..=max_len)
}

fn seq(values: &[i32]) -> TritSequence {
    TritSequence::from_values(values).unwrap()
}

/// `I(q; b) = I(q; T_N b)` on the sampling grid: exhaustive for `N <= 8`,
/// randomized for `9 <= N <= 12`.
pub fn check_mirror_complement_invariance() -> Check {
    let base = Geometry::bench_setup();
    let compare = |bits: &BitPattern, two_ks_geom: &Geometry| -> Result<(), String> {
        let image = bits.mirror_complement();
        let n = bits.len();
        for m in -(n as isize - 1)..n as isize {
            let q = two_ks_geom.sampling_point(m);
            let a = fraunhofer_intensity(two_ks_geom, bits, q, IntensityScale::Normalized);
            let b = fraunhofer_intensity(two_ks_geom, &image, q, IntensityScale::Normalized);
            if (a - b).abs() > 1e-10 * a.abs().max(b.abs()).max(1.0) {
                return Err(format!("{bits} vs {image} at m = {m}: {a} != {b}"));
            }
        }
        Ok(())
    };
    let mut checked = 0;
    for n in 1..=8 {
        let geom = base.with_cantilevers(n).map_err(|e| e.to_string())?;
        for v in 0..1u64 << n {
            compare(&BitPattern::new(bits_of(v, n)).unwrap(), &geom)?;
            checked += 1;
        }
    }
    run(
        300,
        (9usize..=12, any::<u64>(), 1.0f64..150.0),
        |(n, v, depth_nm)| {
            let geom = base
                .with_cantilevers(n)
                .and_then(|g| g.with_depth(depth_nm * 1e-9))
                .unwrap();
            compare(&BitPattern::new(bits_of(v, n)).unwrap(), &geom).map_err(TestCaseError::fail)
        },
    )?;
    Ok(format!(
        "{checked} exhaustive patterns + 300 random (N 9..12)"
    ))
}

/// `f(-n) = conj f(n)` and `f(0) = N` exactly.
pub fn check_hermitian_symmetry() -> Check {
    run(
        500,
        (1usize..=16, any::<u64>(), 0.0f64..PI),
        |(n, v, two_ks)| {
            let f = structure_factor(&BitPattern::new(bits_of(v, n)).unwrap(), two_ks);
            prop_assert_eq!(f.get(0).re, n as f64);
            prop_assert_eq!(f.get(0).im, 0.0);
            for k in 1..n as isize {
                prop_assert!((f.get(-k) - f.get(k).conj()).norm() <= 1e-12 * n as f64);
            }
            Ok(())
        },
    )?;
    Ok("500 random patterns, N <= 16".into())
}

/// Closed forms for the real and imaginary parts of `f(n)`, and the
/// intensity, against direct summation. Exhaustive over all patterns with
/// `N <= 10` at several depths.
pub fn check_coefficient_identities() -> Check {
    let mut patterns = 0;
    for two_ks in [FRAC_PI_2, 0.3, 1.1, 2.9] {
        let (sin, cos) = two_ks.sin_cos();
        for n in 1..=10usize {
            for v in 0..1u64 << n {
                let b = bits_of(v, n);
                let bits = BitPattern::new(b.clone()).unwrap();
                let f = structure_factor(&bits, two_ks);
                let digit = |i: usize| i32::from(b[i]);
                for k in 0..n {
                    let re: f64 = (0..n - k)
                        .map(|p| {
                            let t = f64::from(digit(k + p) - digit(p));
                            1.0 + (cos - 1.0) * t * t
                        })
                        .sum();
                    if (f.get(k as isize).re - re).abs() > 1e-12 * n as f64 {
                        return Err(format!(
                            "Re f({k}) for {bits}: {} vs {re}",
                            f.get(k as isize).re
                        ));
                    }
                }
                if n % 2 == 0 {
                    for k in 1..=n / 2 {
                        let im = sin
                            * f64::from((0..k).map(|p| digit(n - 1 - p) - digit(p)).sum::<i32>());
                        if (f.get(k as isize).im - im).abs() > 1e-12 * n as f64 {
                            return Err(format!(
                                "Im f({k}) for {bits}: {} vs {im}",
                                f.get(k as isize).im
                            ));
                        }
                    }
                }
                let geom = Geometry::bench_setup().with_cantilevers(n).unwrap();
                for qd in [0.0, 0.37, -1.9, 2.5] {
                    let q = qd / geom.pitch();
                    let direct = direct_intensity(&b, two_ks, qd);
                    let model = probe_readout::physics::intensity_from_coefficients(
                        &geom,
                        &f,
                        q,
                        IntensityScale::Normalized,
                    );
                    if (model - direct).abs() > 1e-12 * (n * n) as f64 {
                        return Err(format!(
                            "intensity for {bits} at qd = {qd}: {model} vs {direct}"
                        ));
                    }
                }
                patterns += 1;
            }
        }
    }
    Ok(format!("{patterns} pattern/depth pairs"))
}

/// Noiseless trit recovery from the structure factor for random sequences
/// and depths.
pub fn check_telescoping_recovery() -> Check {
    run(
        500,
        (trit_strategy(10), 0.05f64..3.09),
        |(values, two_ks)| {
            let trits = seq(&values);
            let f = structure_factor(&trits_to_indentations(&trits), two_ks);
            let out = recover_trits_noiseless(&f, two_ks).unwrap();
            prop_assert_eq!(out.trits, trits);
            prop_assert!(out.max_deviation < 1e-9);
            Ok(())
        },
    )?;
    Ok("500 random sequences, L <= 10".into())
}

/// RMS error of the pooled scale estimate over `frames` frames.
pub fn estimator_rms(rows: usize, frames: usize, seed: u64) -> f64 {
    // depth chosen so that sin(2ks) = 0.7, away from the clamp at 1
    let base = Geometry::bench_setup().with_cantilevers(10).unwrap();
    let depth = 0.7f64.asin() / (2.0 * base.wavenumber());
    let geom = base.with_depth(depth).unwrap();
    let noise = NoiseParams::new(0.1, seed).unwrap();
    let jitter = JitterParams::none(1.0);
    let mut rng = noise.rng();
    let mut sum_sq = 0.0;
    for _ in 0..frames {
        let trits: Vec<TritSequence> = (0..rows)
            .map(|_| TritSequence::from_index(rng.random_range(0..243), 5))
            .collect();
        let frame = simulate_array_read(&trits, &geom, &noise, &jitter, &mut rng).unwrap();
        let c = estimate_scale(&frame, 0.1).c_n;
        sum_sq += (c - frame.genie_gain()).powi(2);
    }
    (sum_sq / frames as f64).sqrt()
}

/// Quadrupling the pooled sample count halves the error (within 20 %).
pub fn check_estimator_sqrt_n() -> Check {
    let small = estimator_rms(50, 4000, 11);
    let large = estimator_rms(200, 4000, 12);
    let ratio = small / large;
    if (1.6..=2.4).contains(&ratio) {
        Ok(format!("rms {small:.3e} -> {large:.3e}, ratio {ratio:.3}"))
    } else {
        Err(format!(
            "rms {small:.3e} -> {large:.3e}, ratio {ratio:.3} outside 2 +- 20%"
        ))
    }
}

/// Signal loss `1 - sin((pi/2) e^{-x^2})` under weak jitter: below the
/// depth loss `1 - e^{-x^2}` for `x <= 0.3`, and quartic with coefficient
/// `pi^2/8` (10 %) for `x <= 0.1`.
pub fn check_jitter_taylor() -> Check {
    let loss = |x: f64| {
        // 1 - cos(delta) with delta = (pi/2)(1 - e^{-x^2}), cancellation-free
        let delta = -FRAC_PI_2 * (-x * x).exp_m1();
        2.0 * (delta / 2.0).sin().powi(2)
    };
    let coeff = PI * PI / 8.0;
    let mut worst: f64 = 0.0;
    for i in 1..=300 {
        let x = 0.3 * i as f64 / 300.0;
        let depth_loss = -(-x * x).exp_m1();
        if loss(x) >= depth_loss {
            return Err(format!(
                "x = {x}: signal loss {} >= depth loss {depth_loss}",
                loss(x)
            ));
        }
        if x <= 0.1 {
            let quartic = coeff * x.powi(4);
            let rel = (loss(x) - quartic).abs() / quartic;
            worst = worst.max(rel);
            if rel > 0.1 {
                return Err(format!("x = {x}: quartic term off by {rel:.3}"));
            }
        }
    }
    Ok(format!("worst relative quartic error {worst:.2e}"))
}

fn ter_csv(seed: u64) -> Vec<u8> {
    let mut cfg = ExperimentConfig::parse(
        ExperimentKind::TerSweep,
        "n = 10\nsnr_db = 6, 8\ntrials = 20000\nbatch = 700",
    )
    .unwrap();
    cfg.seed = seed;
    let curve = run_ter_sweep(&cfg).unwrap();
    let mut buf = Vec::new();
    output::write_ter_csv(&mut buf, &cfg, &curve).unwrap();
    buf
}

/// Same seed gives byte-identical output; another seed does not.
pub fn check_seed_reproducibility() -> Check {
    let a = ter_csv(5);
    if a != ter_csv(5) {
        return Err("same seed, different CSV".into());
    }
    if a == ter_csv(6) {
        return Err("different seeds, identical CSV".into());
    }
    let geom = Geometry::bench_setup().with_cantilevers(10).unwrap();
    let noise = NoiseParams::new(0.2, 9).unwrap();
    let jitter = JitterParams::new(1e-9, 10e-9).unwrap();
    let rows: Vec<_> = (0..20)
        .map(|i| TritSequence::from_index(i * 13, 5))
        .collect();
    let f1 = simulate_array_read(&rows, &geom, &noise, &jitter, &mut noise.rng()).unwrap();
    let f2 = simulate_array_read(&rows, &geom, &noise, &jitter, &mut noise.rng()).unwrap();
    if f1 != f2 {
        return Err("array read not reproducible".into());
    }
    Ok(format!("{} byte CSV reproduced", a.len()))
}

pub fn trits_from(values: &[i32]) -> Vec<Trit> {
    values
        .iter()
        .map(|&v| Trit::from_value(v).unwrap())
        .collect()
}
