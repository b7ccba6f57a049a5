//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;

use probe_readout::channel::{optimal_pit_depth, transmit_into};
use probe_readout::detect::SequenceDetector;
use probe_readout::harness::{
    noiseless_roundtrip, run_fresnel_sweep, run_jitter_experiment, run_pit_depth_sweep,
    run_ter_sweep, ExperimentConfig, ExperimentKind, TerCurve, TerRow,
};
use probe_readout::modem::{count_distinct_patterns, oversampled_grid, CountMethod, TritSequence};
use probe_readout::physics::{
    intensity_from_coefficients, structure_factor, BitPattern, IntensityScale, KirchhoffSolver,
    ObservationPoint,
};
use probe_readout::seeds::rng_for;
use probe_readout::Geometry;

use support::Check;

type Named = (&'static str, fn() -> Check);

fn config(kind: ExperimentKind, text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(kind, text).expect("acceptance config")
}

fn row<'a>(curve: &'a TerCurve, detector: &str, parameter: f64) -> Result<&'a TerRow, String> {
    curve
        .row(detector, parameter)
        .ok_or_else(|| format!("no {detector} row at {parameter}"))
}

fn pattern_counts() -> Check {
    for n in 1..=12 {
        let formula =
            count_distinct_patterns(n, CountMethod::Formula).map_err(|e| e.to_string())?;
        let brute =
            count_distinct_patterns(n, CountMethod::BruteForce).map_err(|e| e.to_string())?;
        let oracle = support::orbit_count(n);
        if formula != brute || brute != oracle {
            return Err(format!(
                "N = {n}: formula {formula}, brute {brute}, oracle {oracle}"
            ));
        }
    }
    for n in 1..=10 {
        let formula = count_distinct_patterns(n, CountMethod::Formula).unwrap();
        for two_ks in [std::f64::consts::FRAC_PI_2, 1.0] {
            let distinct = support::distinct_intensity_count(n, two_ks);
            if distinct != formula {
                return Err(format!(
                    "N = {n}, 2ks = {two_ks}: {distinct} distinct intensities, formula {formula}"
                ));
            }
        }
    }
    Ok("N = 1..12 orbit counts match; distinct intensities match for N <= 10".into())
}

fn noiseless_roundtrip_check() -> Check {
    let mut rng = rng_for(&[2024]);
    let base = Geometry::bench_setup();
    let mut worst: f64 = 0.0;
    let mut bits = 0usize;
    for i in 0..1000 {
        let n = 4 + 2 * (i % 9);
        let geom = base.with_cantilevers(n).map_err(|e| e.to_string())?;
        let len = rng.random_range(1..=300);
        let payload: Vec<bool> = (0..len).map(|_| rng.random()).collect();
        let rt = noiseless_roundtrip(&geom, &payload).map_err(|e| format!("N = {n}: {e}"))?;
        if rt.decoded != payload {
            return Err(format!("payload {i} (N = {n}, {len} bits) decoded wrongly"));
        }
        if rt.max_deviation >= 1e-6 {
            return Err(format!("payload {i}: deviation {}", rt.max_deviation));
        }
        worst = worst.max(rt.max_deviation);
        bits += len;
    }
    Ok(format!(
        "1000 payloads ({bits} bits), max deviation {worst:.1e}"
    ))
}

fn ml_gain_over_threshold() -> Check {
    let cfg = config(
        ExperimentKind::TerSweep,
        "n = 20\nsnr_db = 6:0.5:16\ntrials = 10000000",
    );
    let curve = run_ter_sweep(&cfg).map_err(|e| e.to_string())?;
    let target = 1e-4;
    let crossing = |det: &str, pick: fn(&TerRow) -> f64| {
        let mut c = TerCurve::default();
        for r in curve.detector(det) {
            let mut r = r.clone();
            r.ter = pick(&r);
            c.push(r);
        }
        c.crossing(det, target)
            .ok_or_else(|| format!("{det} never reaches TER {target}"))
    };
    let th = crossing("threshold", |r| r.ter)?;
    let ml = crossing("ml", |r| r.ter)?;
    let gain = th - ml;
    // crossings of the interval bounds bracket the gain
    let low = crossing("threshold", |r| r.ci_low)? - crossing("ml", |r| r.ci_high)?;
    let high = crossing("threshold", |r| r.ci_high)? - crossing("ml", |r| r.ci_low)?;
    let detail = format!(
        "threshold {th:.2} dB, ML {ml:.2} dB, gain {gain:.2} dB (interval bracket {low:.2}..{high:.2})"
    );
    if (2.0..=3.0).contains(&low) && (2.0..=3.0).contains(&high) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ml_matches_exhaustive_search() -> Check {
    let mut rng = rng_for(&[4]);
    let mut detector = SequenceDetector::new();
    let mut received = Vec::new();
    let mut out = Vec::new();
    for i in 0..1000 {
        let trits = TritSequence::from_index(rng.random_range(0..243), 5);
        let gain = rng.random_range(0.3..1.0);
        let sigma = rng.random_range(0.05..0.6);
        transmit_into(&trits, gain, sigma, &mut rng, &mut received);
        let metric = detector
            .detect_into(&received, gain, &mut out)
            .map_err(|e| e.to_string())?;
        let (best, oracle) = support::brute_force_ml(&received, gain);
        if metric != best {
            return Err(format!(
                "instance {i}: trellis metric {metric} vs exhaustive {best}"
            ));
        }
        if out != support::trits_from(&oracle) {
            return Err(format!(
                "instance {i}: trellis path differs from exhaustive argmin"
            ));
        }
    }
    Ok("1000 instances, N = 10: metrics and paths identical".into())
}

fn within_factor_two(a: &TerRow, b: &TerRow) -> bool {
    a.ci_high <= 2.0 * b.ci_low && b.ci_high <= 2.0 * a.ci_low
}

fn jitter_lln_vs_genie() -> Check {
    let cfg = config(ExperimentKind::Jitter, "trials = 100000");
    let curve = run_jitter_experiment(&cfg).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut ok = true;
    for &snr in &cfg.snr_db {
        for det in ["threshold", "ml"] {
            let lln = row(&curve, &format!("{det}-lln"), snr)?;
            let genie = row(&curve, &format!("{det}-genie"), snr)?;
            let factor = within_factor_two(lln, genie);
            let overlap = lln.overlaps(genie);
            ok &= factor && overlap;
            lines.push(format!(
                "{snr} dB {det}: lln {:.4e} [{:.4e}, {:.4e}] genie {:.4e} [{:.4e}, {:.4e}] ratio {:.3} {}{}",
                lln.ter,
                lln.ci_low,
                lln.ci_high,
                genie.ter,
                genie.ci_low,
                genie.ci_high,
                lln.ter / genie.ter,
                if factor { "within 2x" } else { "NOT within 2x" },
                if overlap { ", intervals overlap" } else { ", intervals disjoint" },
            ));
        }
    }
    for note in &curve.notes {
        lines.push(note.clone());
    }
    let detail = lines.join("\n        ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pit_depth_table_and_ter() -> Check {
    let table: [(f64, f64); 3] = [(780.0, 97.50), (650.0, 81.25), (405.0, 50.63)];
    for (lambda_nm, quoted) in table {
        let depth = optimal_pit_depth(lambda_nm * 1e-9) * 1e9;
        if (depth - lambda_nm / 8.0).abs() > 1e-9 || (depth - quoted).abs() > 0.005 {
            return Err(format!(
                "{lambda_nm} nm: optimal depth {depth} nm, quoted {quoted}"
            ));
        }
    }
    let cfg = config(
        ExperimentKind::PitDepth,
        "n = 20\nwavelengths_nm = 405\ndepths_nm = 10, 50.625\ntrials = 4000000",
    );
    let curve = run_pit_depth_sweep(&cfg).map_err(|e| e.to_string())?;
    let shallow = row(&curve, "ml-405nm", 10.0)?;
    let optimal = row(&curve, "ml-405nm", 50.625)?;
    let detail = format!(
        "depths 97.50/81.25/50.625 nm; 405 nm at 10 nm: TER {:.3e} [{:.3e}, {:.3e}]; at lambda/8: {:.3e}",
        shallow.ter, shallow.ci_low, shallow.ci_high, optimal.ter
    );
    if shallow.ci_low >= 1e-5 && shallow.ci_high <= 1e-3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fresnel_degradation() -> Check {
    let cfg = config(
        ExperimentKind::Fresnel,
        "fresnel = 1, 0.1, 0.01, 0.001\nsnr_db = 13\ntrials = 10000000",
    );
    let curve = run_fresnel_sweep(&cfg).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut ok = true;
    for &f in &cfg.fresnel {
        let near = row(&curve, "ml", f)?;
        let base = row(&curve, "ml-fraunhofer", f)?;
        let pass = if f <= 0.1 {
            near.ci_high <= 2.0 * base.ci_low
        } else {
            near.ci_low >= 100.0 * base.ci_high
        };
        ok &= pass;
        lines.push(format!(
            "F = {f}: TER {:.3e} [{:.3e}, {:.3e}] vs baseline {:.3e} [{:.3e}, {:.3e}], ratio {:.2}{}",
            near.ter,
            near.ci_low,
            near.ci_high,
            base.ter,
            base.ci_low,
            base.ci_high,
            near.ter / base.ter,
            if pass { "" } else { " (fails)" }
        ));
    }
    let detail = lines.join("\n        ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn kirchhoff_convergence() -> Check {
    let base = Geometry::bench_setup();
    let n = base.n_cantilevers();
    let k = base.wavenumber();
    let mut diffs = Vec::new();
    for fresnel in [1.0, 0.1, 0.01, 0.001] {
        let geom = base
            .with_fresnel_number(fresnel)
            .map_err(|e| e.to_string())?;
        let qs = oversampled_grid(n, geom.pitch(), 4);
        let points: Vec<_> = qs
            .iter()
            .map(|&q| ObservationPoint::at_q(q, k, geom.sensor_distance()))
            .collect();
        let table = KirchhoffSolver::new(geom)
            .and_then(|s| s.strip_table(&points))
            .map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for v in 0..1u64 << n {
            let bits = BitPattern::new(support::bits_of(v, n)).unwrap();
            let coeffs = structure_factor(&bits, geom.two_ks());
            let near = table.intensities(&bits, IntensityScale::Normalized);
            let (mut num, mut den) = (0.0, 0.0);
            for (&q, kir) in qs.iter().zip(&near) {
                let far =
                    intensity_from_coefficients(&geom, &coeffs, q, IntensityScale::Normalized);
                num += (kir - far).powi(2);
                den += far * far;
            }
            worst = worst.max((num / den).sqrt());
        }
        diffs.push((fresnel, worst));
    }
    let monotone = diffs.windows(2).all(|w| w[1].1 <= w[0].1);
    let last = diffs.last().unwrap().1;
    let detail = diffs
        .iter()
        .map(|(f, d)| format!("F = {f}: {d:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    if monotone && last < 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn property_suites() -> Check {
    let checks: [Named; 7] = [
        (
            "mirror-complement invariance",
            support::check_mirror_complement_invariance,
        ),
        ("hermitian symmetry", support::check_hermitian_symmetry),
        (
            "coefficient identities",
            support::check_coefficient_identities,
        ),
        ("telescoping recovery", support::check_telescoping_recovery),
        ("estimator sqrt(n)", support::check_estimator_sqrt_n),
        ("jitter quartic bound", support::check_jitter_taylor),
        ("seed reproducibility", support::check_seed_reproducibility),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, check) in checks {
        match check() {
            Ok(d) => lines.push(format!("{name}: ok, {d}")),
            Err(d) => {
                ok = false;
                lines.push(format!("{name}: FAILED, {d}"));
            }
        }
    }
    let detail = lines.join("\n        ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [Named; 9] = [
        ("pattern-count", pattern_counts),
        ("noiseless-roundtrip", noiseless_roundtrip_check),
        ("ml-snr-gain", ml_gain_over_threshold),
        ("ml-oracle", ml_matches_exhaustive_search),
        ("jitter-lln", jitter_lln_vs_genie),
        ("pit-depth", pit_depth_table_and_ter),
        ("fresnel-ter", fresnel_degradation),
        ("kirchhoff-convergence", kirchhoff_convergence),
        ("property-suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {} {name} ({secs:.1} s)\n        {detail}", i + 1);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
