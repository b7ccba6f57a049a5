//! CSV emission. Output depends only on the configuration, so equal inputs
//! give byte-identical files.

use std::io::{self, Write};

use super::config::ExperimentConfig;
use super::experiments::Profile;
use super::stats::TerCurve;

pub const TER_COLUMNS: [&str; 7] = [
    "parameter",
    "trials",
    "errors",
    "ter",
    "ci_low",
    "ci_high",
    "detector",
];

fn write_metadata<W: Write>(out: &mut W, cfg: &ExperimentConfig) -> io::Result<()> {
    writeln!(out, "# probe-readout {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# experiment {}", cfg.kind)?;
    writeln!(out, "# config-sha256 {}", cfg.hash())?;
    writeln!(out, "# seed {}", cfg.seed)
}

pub fn write_ter_csv<W: Write>(
    out: &mut W,
    cfg: &ExperimentConfig,
    curve: &TerCurve,
) -> io::Result<()> {
    write_metadata(out, cfg)?;
    for note in &curve.notes {
        writeln!(out, "# {note}")?;
    }
    writeln!(out, "{}", TER_COLUMNS.join(","))?;
    for r in &curve.rows {
        writeln!(
            out,
            "{},{},{},{:e},{:e},{:e},{}",
            r.parameter, r.trials, r.errors, r.ter, r.ci_low, r.ci_high, r.detector
        )?;
    }
    Ok(())
}

pub fn write_profile_csv<W: Write>(
    out: &mut W,
    cfg: &ExperimentConfig,
    profile: &Profile,
) -> io::Result<()> {
    write_metadata(out, cfg)?;
    writeln!(out, "{}", profile.columns.join(","))?;
    for row in &profile.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
