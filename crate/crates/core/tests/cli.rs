use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_probe-readout"))
}

#[test]
fn count_prints_closed_form() {
    let out = bin().args(["count", "--n", "5"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "16");
    let out = bin()
        .args(["count", "--n", "6", "--method", "brute"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "36");
}

#[test]
fn missing_config_exits_one() {
    let out = bin()
        .args(["ter", "--config", "missing.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("missing.cfg"));
}

#[test]
fn bad_config_values_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n = 10\nlaser = red\n").unwrap();
    let out = bin().args(["ter", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("laser"));
    let out = bin().args(["ter", "--set", "n=7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["ter", "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn profile_preset_writes_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let out = bin()
        .args(["profile", "--preset", "paper-fig4", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(lines.next(), Some("theta_rad,intensity"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2001);
    assert!(rows.iter().all(|r| r.len() == 2));
    assert!(text.lines().any(|l| l.starts_with("# config-sha256 ")));
    assert!(text.lines().any(|l| l == "# seed 1"));

    // principal maximum at 0; with the single-strip envelope divided out the
    // grating orders sit at theta = m lambda / d with height N^2
    let peak = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert_eq!(peak[0], 0.0);
    let (lambda, d, w, v) = (635e-9f64, 20e-6f64, 13.9e-6f64, 1.0f64);
    let k = 2.0 * std::f64::consts::PI / lambda;
    let envelope = |theta: f64| {
        let x = k * theta * w / 2.0;
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        k * w * w * theta.cos() / (2.0 * std::f64::consts::PI * v) * sinc * sinc
    };
    for m in [-2.0, -1.0, 1.0, 2.0] {
        let order = m * lambda / d;
        let best = rows
            .iter()
            .filter(|r| (r[0] - order).abs() < 3e-3)
            .max_by(|a, b| (a[1] / envelope(a[0])).total_cmp(&(b[1] / envelope(b[0]))))
            .unwrap();
        assert!((best[0] - order).abs() <= 1e-4, "order {m} at {}", best[0]);
        assert!((best[1] / envelope(best[0]) - 25.0).abs() < 0.1);
    }
}

#[test]
fn ter_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ter.cfg");
    std::fs::write(&cfg, "# small sweep\nn = 10\nsnr_db = 8, 10\n").unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .args([
                "ter", "--trials", "20000", "--seed", seed, "--format", "csv", "--config",
            ])
            .arg(&cfg)
            .arg("--out")
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "9");
    assert_eq!(a, run("b.csv", "9"));
    assert_ne!(a, run("c.csv", "10"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("parameter,trials,errors,ter,ci_low,ci_high,detector"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
}
